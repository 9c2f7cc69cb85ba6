#pragma once

// Independent reference implementations used to derive expected test values.
// Everything here is deliberately brute-force and separate from the library
// code paths it checks.

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "morseid/convex.hpp"
#include "morseid/grid.hpp"

namespace oracles {

// Optimal objective by enumerating basic solutions (active-set subsets of
// rows and finite bounds). Requires a bounded feasible LP to be meaningful.
std::optional<double> lp_vertex_enumeration(const morseid::LinearProgram& lp, double feas_tol);

// Closed-box overlap by looping over every cell.
std::vector<morseid::CellIndex> brute_force_cells_intersecting(const morseid::CubicalGrid& grid,
                                                               const morseid::Box& query);

// All mutual-reachability equivalence classes via Floyd-Warshall.
std::vector<std::vector<int>> mutual_reachability_classes(
    const std::vector<std::vector<int>>& adjacency);

// Plain BFS forward closure including the seeds.
std::set<int> bfs_closure(const std::vector<std::vector<int>>& adjacency,
                          const std::vector<int>& seeds);

// Exponent tuples with |e| <= degree, enumerated by nested loops (any order).
std::vector<std::vector<int>> monomial_exponents(int dim, int degree);

}  // namespace oracles
