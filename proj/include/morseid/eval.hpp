#pragma once

#include <string>
#include <vector>

#include "morseid/morse.hpp"

namespace morseid {

/// Expected aggregated decomposition, supplied per benchmark: node labels,
/// reference centroids for spatial matching, and the Hasse order.
struct AggTargetNode {
    std::string label;
    Vector centroid;
    bool minimal = false;
};

struct AggTarget {
    std::vector<AggTargetNode> nodes;
    std::vector<std::pair<int, int>> hasse;  // (upper, lower)
};

AggTarget toggle_target();        // 3 -> {1, 2}
AggTarget van_der_pol_target();   // 2 -> {1}

struct AggregatedMorseGraph {
    AggTarget target;
    std::vector<std::vector<int>> members;            // per target node
    std::vector<std::vector<std::int32_t>> cells;     // union of member Morse sets
    std::vector<int> residue;                         // unassigned original nodes
};

/// Assigns original Morse nodes to the target nodes: minimal nodes by nearest
/// centroid, the rest to the order-compatible target with the nearest centroid
/// within `radius` (falling back to a forced non-minimal target when unique).
AggregatedMorseGraph aggregate(const CubicalGrid& grid, const MorseGraph& mg,
                               const AggTarget& target, double radius);

/// Cell-count intersection over union; two empty sets count as identical.
double iou(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b,
           bool* both_empty = nullptr);

struct MethodRun {
    std::string method;
    const CellMap* map = nullptr;
    const MorseGraph* mg = nullptr;
};

struct MetricsRow {
    std::string method;
    int raw_nodes = 0;
    std::vector<double> ms_iou;   // per target label; -1 marks a failed row
    std::vector<double> roa_iou;
    bool failed = false;
    std::string note;
};

struct CompareResult {
    std::vector<MetricsRow> rows;
    std::vector<std::string> labels;
    std::string csv;
    std::string table;
    // Aggregated artifacts of the reference run (first row).
    AggregatedMorseGraph reference_agg;
    std::vector<std::vector<std::int32_t>> reference_roa;  // per target node
};

/// Aggregates every run against the target and scores Morse-set / RoA IoU
/// against the reference (the first run).
CompareResult compare(const std::vector<MethodRun>& runs, const AggTarget& target,
                      double radius_cells = 10.0);

}  // namespace morseid
