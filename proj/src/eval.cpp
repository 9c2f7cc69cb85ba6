#include "morseid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace morseid {

AggTarget toggle_target() {
    AggTarget t;
    Vector a(2), b(2), c(2);
    a << 1.0, 5.0;
    b << 5.0, 1.0;
    c << 3.0, 3.0;
    t.nodes.push_back({"1", a, true});
    t.nodes.push_back({"2", b, true});
    t.nodes.push_back({"3", c, false});
    t.hasse = {{2, 0}, {2, 1}};
    return t;
}

AggTarget van_der_pol_target() {
    AggTarget t;
    Vector o = Vector::Zero(2);
    t.nodes.push_back({"1", o, true});    // limit-cycle attractor
    t.nodes.push_back({"2", o, false});   // repeller at the origin
    t.hasse = {{1, 0}};
    return t;
}

namespace {

Vector node_centroid(const CubicalGrid& grid, const std::vector<std::int32_t>& cells) {
    Vector c = Vector::Zero(grid.dim());
    for (const std::int32_t idx : cells) c += cell_center(grid, grid.from_linear(idx));
    if (!cells.empty()) c /= static_cast<double>(cells.size());
    return c;
}

// target_leq[a][b]: target node a <= b in the aggregated order.
std::vector<std::vector<bool>> target_order(const AggTarget& t) {
    const int m = static_cast<int>(t.nodes.size());
    std::vector<std::vector<bool>> leq(m, std::vector<bool>(m, false));
    for (int i = 0; i < m; ++i) leq[i][i] = true;
    for (const auto& [up, lo] : t.hasse) leq[lo][up] = true;
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            if (leq[i][k])
                for (int j = 0; j < m; ++j)
                    if (leq[k][j]) leq[i][j] = true;
    return leq;
}

}  // namespace

AggregatedMorseGraph aggregate(const CubicalGrid& grid, const MorseGraph& mg,
                               const AggTarget& target, double radius) {
    const int m = mg.size();
    const int tn = static_cast<int>(target.nodes.size());
    AggregatedMorseGraph out;
    out.target = target;
    out.members.assign(tn, {});
    out.cells.assign(tn, {});

    const auto leq = target_order(target);
    std::vector<int> assign(m, -1);

    std::vector<Vector> centroids(m);
    for (int i = 0; i < m; ++i) centroids[i] = node_centroid(grid, mg.node_cells[i]);

    // Pass 1: minimal original nodes to minimal target nodes by centroid.
    for (int i = 0; i < m; ++i) {
        if (!mg.minimal[i]) continue;
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (int t = 0; t < tn; ++t) {
            if (!target.nodes[t].minimal) continue;
            const double d = (centroids[i] - target.nodes[t].centroid).norm();
            if (d < bestd) {
                bestd = d;
                best = t;
            }
        }
        if (best < 0) throw NumericalError("aggregate: target has no minimal node");
        assign[i] = best;
    }

    // Pass 2: remaining nodes bottom-up; admissible targets sit above every
    // already-assigned node below them.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        int below_a = 0, below_b = 0;
        for (int q = 0; q < m; ++q) {
            if (q != a && mg.reaches[a][q]) ++below_a;
            if (q != b && mg.reaches[b][q]) ++below_b;
        }
        if (below_a != below_b) return below_a < below_b;
        return a < b;
    });

    for (const int i : order) {
        if (assign[i] >= 0) continue;
        std::vector<bool> admissible(tn, true);
        for (int q = 0; q < m; ++q) {
            if (q == i || assign[q] < 0) continue;
            if (mg.reaches[i][q]) {
                // q below i: need assign(q) <= t.
                for (int t = 0; t < tn; ++t)
                    if (!leq[assign[q]][t]) admissible[t] = false;
            }
            if (mg.reaches[q][i]) {
                // q above i: need t <= assign(q).
                for (int t = 0; t < tn; ++t)
                    if (!leq[t][assign[q]]) admissible[t] = false;
            }
        }
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (int t = 0; t < tn; ++t) {
            if (!admissible[t]) continue;
            const double d = (centroids[i] - target.nodes[t].centroid).norm();
            if (d < bestd) {
                bestd = d;
                best = t;
            }
        }
        if (best >= 0 && bestd <= radius) {
            assign[i] = best;
            continue;
        }
        int forced = -1, count = 0;
        for (int t = 0; t < tn; ++t)
            if (admissible[t] && !target.nodes[t].minimal) {
                forced = t;
                ++count;
            }
        if (count == 1) {
            assign[i] = forced;
        } else {
            out.residue.push_back(i);
        }
    }

    for (int i = 0; i < m; ++i) {
        if (assign[i] < 0) continue;
        out.members[assign[i]].push_back(i);
        auto& cells = out.cells[assign[i]];
        cells.insert(cells.end(), mg.node_cells[i].begin(), mg.node_cells[i].end());
    }
    for (auto& cells : out.cells) std::sort(cells.begin(), cells.end());

    // Structural check: the induced map on posets must be monotone.
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (a == b || assign[a] < 0 || assign[b] < 0) continue;
            if (mg.reaches[a][b] && !leq[assign[b]][assign[a]])
                throw NumericalError("aggregate: assignment violates the partial order");
        }
    return out;
}

double iou(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b,
           bool* both_empty) {
    if (both_empty) *both_empty = false;
    if (a.empty() && b.empty()) {
        if (both_empty) *both_empty = true;
        return 1.0;  // identical empties, flagged for the caller
    }
    std::size_t ia = 0, ib = 0, inter = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) {
            ++inter;
            ++ia;
            ++ib;
        } else if (a[ia] < b[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

CompareResult compare(const std::vector<MethodRun>& runs, const AggTarget& target,
                      double radius_cells) {
    if (runs.empty()) throw ConfigError("compare: no runs");
    const CubicalGrid& grid = runs[0].map->grid;
    for (const auto& run : runs) {
        if (run.map->grid.subdivisions != grid.subdivisions ||
            run.map->grid.domain.lower != grid.domain.lower ||
            run.map->grid.domain.upper != grid.domain.upper)
            throw ConfigError("compare: runs use different grids");
    }
    const double radius = radius_cells * grid.cell_widths().maxCoeff();
    const int tn = static_cast<int>(target.nodes.size());

    CompareResult result;
    for (const auto& node : target.nodes) result.labels.push_back(node.label);

    struct RunAgg {
        bool ok = false;
        AggregatedMorseGraph agg;
        std::vector<std::vector<std::int32_t>> roa;
        std::string note;
    };
    std::vector<RunAgg> aggs(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        try {
            aggs[r].agg = aggregate(grid, *runs[r].mg, target, radius);
            aggs[r].roa.resize(tn);
            for (int t = 0; t < tn; ++t)
                aggs[r].roa[t] = aggs[r].agg.cells[t].empty()
                                     ? std::vector<std::int32_t>{}
                                     : region_of_attraction_cells(*runs[r].map,
                                                                  aggs[r].agg.cells[t]);
            aggs[r].ok = true;
            if (!aggs[r].agg.residue.empty())
                aggs[r].note = std::to_string(aggs[r].agg.residue.size()) + " residue nodes";
        } catch (const std::exception& e) {
            aggs[r].ok = false;
            aggs[r].note = e.what();
        }
    }
    if (!aggs[0].ok)
        throw NumericalError("compare: reference aggregation failed: " + aggs[0].note);
    result.reference_agg = aggs[0].agg;
    result.reference_roa = aggs[0].roa;

    for (std::size_t r = 0; r < runs.size(); ++r) {
        MetricsRow row;
        row.method = runs[r].method;
        row.raw_nodes = runs[r].mg->size();
        row.note = aggs[r].note;
        if (!aggs[r].ok) {
            row.failed = true;
            row.ms_iou.assign(tn, -1.0);
            row.roa_iou.assign(tn, -1.0);
        } else {
            for (int t = 0; t < tn; ++t) {
                row.ms_iou.push_back(iou(aggs[r].agg.cells[t], aggs[0].agg.cells[t]));
                row.roa_iou.push_back(iou(aggs[r].roa[t], aggs[0].roa[t]));
            }
        }
        result.rows.push_back(std::move(row));
    }

    // CSV: method,raw_nodes,ms_iou_<label>...,roa_iou_<label>...
    {
        std::ostringstream csv;
        csv << "method,raw_nodes";
        for (const auto& l : result.labels) csv << ",ms_iou_" << l;
        for (const auto& l : result.labels) csv << ",roa_iou_" << l;
        csv << "\n";
        for (const auto& row : result.rows) {
            csv << row.method << "," << row.raw_nodes;
            for (double v : row.ms_iou) csv << "," << format_double(v);
            for (double v : row.roa_iou) csv << "," << format_double(v);
            csv << "\n";
        }
        result.csv = csv.str();
    }
    {
        std::ostringstream tab;
        tab << std::left << std::setw(18) << "method" << std::right << std::setw(8) << "nodes";
        for (const auto& l : result.labels) tab << std::setw(10) << ("M(" + l + ")");
        for (const auto& l : result.labels) tab << std::setw(10) << ("RoA(" + l + ")");
        tab << "\n";
        for (const auto& row : result.rows) {
            tab << std::left << std::setw(18) << row.method << std::right << std::setw(8)
                << row.raw_nodes;
            tab << std::fixed << std::setprecision(3);
            for (double v : row.ms_iou) tab << std::setw(10) << v;
            for (double v : row.roa_iou) tab << std::setw(10) << v;
            tab.unsetf(std::ios::fixed);
            if (!row.note.empty()) tab << "  # " << row.note;
            tab << "\n";
        }
        result.table = tab.str();
    }
    return result;
}

}  // namespace morseid
