#pragma once

#include <cstdint>
#include <vector>

#include "morseid/common.hpp"

namespace morseid {

/// Axis-aligned box, lower[d] < upper[d] on every axis.
struct Box {
    Vector lower;
    Vector upper;

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const Vector& x) const;
    Vector widths() const { return upper - lower; }
};

Box make_box(const Vector& lower, const Vector& upper);

/// Multi-index of one cell; entry d lies in [0, subdivisions[d]).
struct CellIndex {
    std::vector<int> multi_index;

    bool operator==(const CellIndex& o) const { return multi_index == o.multi_index; }
    bool operator<(const CellIndex& o) const { return multi_index < o.multi_index; }
};

/// Uniform cubical grid over a rectangular domain.
struct CubicalGrid {
    Box domain;
    std::vector<int> subdivisions;

    int dim() const { return domain.dim(); }
    std::int64_t cell_count() const;
    Vector cell_widths() const;

    /// Row-major linearization (last axis fastest).
    std::int64_t linear_index(const CellIndex& cell) const;
    CellIndex from_linear(std::int64_t idx) const;
    bool in_range(const CellIndex& cell) const;
};

CubicalGrid make_grid(const Box& domain, const std::vector<int>& subdivisions);

/// Closed realization |xi|; exact domain faces on boundary cells.
Box cell_realization(const CubicalGrid& grid, const CellIndex& cell);

/// The 2^n corners of |xi|, ordered by corner-selection bits (bit d = axis d).
std::vector<Vector> cell_vertices(const CubicalGrid& grid, const CellIndex& cell);

Vector cell_center(const CubicalGrid& grid, const CellIndex& cell);

struct CellIntersection {
    std::vector<CellIndex> cells;       // sorted by multi-index
    bool query_escapes_domain = false;  // query box not contained in the domain
};

/// All cells whose closed realization meets the closed query box.
CellIntersection cells_intersecting(const CubicalGrid& grid, const Box& query);

/// Max Euclidean cell diagonal (all cells congruent on a uniform grid).
double grid_diameter(const CubicalGrid& grid);

/// Cell containing x, lower-index cell on shared faces; x must be in the domain.
CellIndex locate_cell(const CubicalGrid& grid, const Vector& x);

}  // namespace morseid
