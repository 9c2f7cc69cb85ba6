#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

namespace oracles {

using morseid::Box;
using morseid::CellIndex;
using morseid::CubicalGrid;
using morseid::LinearProgram;
using morseid::Matrix;
using morseid::Rel;
using morseid::Vector;

std::optional<double> lp_vertex_enumeration(const LinearProgram& lp, double feas_tol) {
    const int n = lp.num_vars();
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Pool every row plus every finite bound as a candidate active hyperplane.
    std::vector<Vector> normals;
    std::vector<double> rhs;
    std::vector<bool> is_eq;
    for (const auto& row : lp.constraints) {
        normals.push_back(row.a);
        rhs.push_back(row.rhs);
        is_eq.push_back(row.rel == Rel::EQ);
    }
    for (std::size_t j = 0; j < lp.bounds.size(); ++j) {
        Vector e = Vector::Zero(n);
        e[static_cast<int>(j)] = 1.0;
        if (lp.bounds[j].lo > -inf) {
            normals.push_back(e);
            rhs.push_back(lp.bounds[j].lo);
            is_eq.push_back(false);
        }
        if (lp.bounds[j].hi < inf) {
            normals.push_back(e);
            rhs.push_back(lp.bounds[j].hi);
            is_eq.push_back(false);
        }
    }

    const int total = static_cast<int>(normals.size());
    auto feasible = [&](const Vector& x) {
        for (const auto& row : lp.constraints) {
            const double v = row.a.dot(x);
            if (row.rel == Rel::LE && v > row.rhs + feas_tol) return false;
            if (row.rel == Rel::GE && v < row.rhs - feas_tol) return false;
            if (row.rel == Rel::EQ && std::abs(v - row.rhs) > feas_tol) return false;
        }
        for (std::size_t j = 0; j < lp.bounds.size(); ++j) {
            if (x[static_cast<int>(j)] < lp.bounds[j].lo - feas_tol) return false;
            if (x[static_cast<int>(j)] > lp.bounds[j].hi + feas_tol) return false;
        }
        return true;
    };

    std::optional<double> best;
    std::vector<int> eq_idx;
    for (int i = 0; i < total; ++i)
        if (is_eq[i]) eq_idx.push_back(i);
    if (static_cast<int>(eq_idx.size()) > n) return std::nullopt;

    std::vector<int> pick = eq_idx;
    std::function<void(int, int)> recurse = [&](int start, int needed) {
        if (needed == 0) {
            Matrix A(n, n);
            Vector b(n);
            for (int k = 0; k < n; ++k) {
                A.row(k) = normals[pick[k]];
                b[k] = rhs[pick[k]];
            }
            Eigen::FullPivLU<Matrix> lu(A);
            if (!lu.isInvertible()) return;
            const Vector x = lu.solve(b);
            if (!x.allFinite() || !feasible(x)) return;
            const double obj = lp.objective.dot(x);
            if (!best || obj < *best) best = obj;
            return;
        }
        for (int i = start; i < total; ++i) {
            if (is_eq[i]) continue;
            pick.push_back(i);
            recurse(i + 1, needed - 1);
            pick.pop_back();
        }
    };
    recurse(0, n - static_cast<int>(eq_idx.size()));
    return best;
}

std::vector<CellIndex> brute_force_cells_intersecting(const CubicalGrid& grid, const Box& query) {
    std::vector<CellIndex> out;
    const std::int64_t total = grid.cell_count();
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const CellIndex cell = grid.from_linear(idx);
        const Box r = cell_realization(grid, cell);
        bool overlap = true;
        for (int d = 0; d < grid.dim(); ++d)
            if (r.upper[d] < query.lower[d] || r.lower[d] > query.upper[d]) overlap = false;
        if (overlap) out.push_back(cell);
    }
    return out;
}

std::vector<std::vector<int>> mutual_reachability_classes(
    const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (int j : adjacency[i]) reach[i][j] = true;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;

    std::vector<int> comp(n, -1);
    int nc = 0;
    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        comp[i] = nc;
        for (int j = i + 1; j < n; ++j)
            if (reach[i][j] && reach[j][i]) comp[j] = nc;
        ++nc;
    }
    std::vector<std::vector<int>> classes(nc);
    for (int i = 0; i < n; ++i) classes[comp[i]].push_back(i);
    return classes;
}

std::set<int> bfs_closure(const std::vector<std::vector<int>>& adjacency,
                          const std::vector<int>& seeds) {
    std::set<int> seen(seeds.begin(), seeds.end());
    std::deque<int> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : adjacency[v])
            if (seen.insert(u).second) queue.push_back(u);
    }
    return seen;
}

std::vector<std::vector<int>> monomial_exponents(int dim, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(dim, 0);
    std::function<void(int)> loop = [&](int d) {
        if (d == dim) {
            int sum = 0;
            for (int v : e) sum += v;
            if (sum <= degree) out.push_back(e);
            return;
        }
        for (int v = 0; v <= degree; ++v) {
            e[d] = v;
            loop(d + 1);
        }
        e[d] = 0;
    };
    loop(0);
    return out;
}

}  // namespace oracles
