#pragma once

#include <cstdint>
#include <vector>

#include "morseid/outer.hpp"

namespace morseid {

struct DiGraph {
    std::int64_t n = 0;
    std::vector<std::vector<std::int32_t>> adj;  // sorted, no parallel edges

    std::int64_t edge_count() const;
};

/// One vertex per cell (row-major), one edge per image cell.
DiGraph to_digraph(const CellMap& map);

struct SccResult {
    std::vector<std::int32_t> component;  // vertex -> component id
    int count = 0;
    std::vector<bool> nontrivial;  // size > 1 or carries a self-edge
};

SccResult scc(const DiGraph& g);

/// Hasse diagram of the reachability order on nontrivial SCCs. Minimal nodes
/// are attractor-like: hasse edges (upper, lower) point down the flow.
struct MorseGraph {
    std::vector<std::vector<std::int32_t>> node_cells;  // sorted linear indices
    std::vector<std::pair<int, int>> hasse_edges;       // (upper, lower)
    std::vector<std::vector<bool>> reaches;  // reaches[p][q]: q reachable from p
    std::vector<bool> minimal;

    int size() const { return static_cast<int>(node_cells.size()); }
};

MorseGraph morse_graph(const CellMap& map);

/// Forward reachability fixed point including the seeds.
std::vector<std::int32_t> reachable_closure(const CellMap& map,
                                            const std::vector<std::int32_t>& seeds);

/// Cells whose iterated image sets eventually land inside the reachable
/// closure of the seed set; fully escaped cells never qualify.
std::vector<std::int32_t> region_of_attraction_cells(const CellMap& map,
                                                     const std::vector<std::int32_t>& seeds);

std::vector<std::int32_t> region_of_attraction(const CellMap& map, const MorseGraph& mg, int p);

}  // namespace morseid
