#pragma once

#include <string>
#include <vector>

#include "morseid/morse.hpp"

namespace morseid {

/// Planar cell-map figure: RoAs as tinted regions, Morse sets saturated,
/// Hasse diagram inset top-right. Only defined for 2-D grids.
std::string render_morse_svg(const CubicalGrid& grid, const MorseGraph& mg,
                             const std::vector<std::vector<std::int32_t>>& roa);

}  // namespace morseid
