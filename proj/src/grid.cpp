#include "morseid/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace morseid {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the pair; distinct streams for distinct inputs.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

bool Box::contains(const Vector& x) const {
    for (int d = 0; d < dim(); ++d)
        if (x[d] < lower[d] || x[d] > upper[d]) return false;
    return true;
}

Box make_box(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size())
        throw ConfigError("box bounds have mismatched dimensions");
    for (int d = 0; d < lower.size(); ++d)
        if (!(lower[d] < upper[d]))
            throw ConfigError("box requires lower < upper on every axis");
    return Box{lower, upper};
}

std::int64_t CubicalGrid::cell_count() const {
    std::int64_t n = 1;
    for (int s : subdivisions) n *= s;
    return n;
}

Vector CubicalGrid::cell_widths() const {
    Vector w = domain.widths();
    for (int d = 0; d < dim(); ++d) w[d] /= subdivisions[d];
    return w;
}

std::int64_t CubicalGrid::linear_index(const CellIndex& cell) const {
    std::int64_t idx = 0;
    for (int d = 0; d < dim(); ++d) idx = idx * subdivisions[d] + cell.multi_index[d];
    return idx;
}

CellIndex CubicalGrid::from_linear(std::int64_t idx) const {
    CellIndex cell;
    cell.multi_index.assign(dim(), 0);
    for (int d = dim() - 1; d >= 0; --d) {
        cell.multi_index[d] = static_cast<int>(idx % subdivisions[d]);
        idx /= subdivisions[d];
    }
    return cell;
}

bool CubicalGrid::in_range(const CellIndex& cell) const {
    if (static_cast<int>(cell.multi_index.size()) != dim()) return false;
    for (int d = 0; d < dim(); ++d)
        if (cell.multi_index[d] < 0 || cell.multi_index[d] >= subdivisions[d]) return false;
    return true;
}

CubicalGrid make_grid(const Box& domain, const std::vector<int>& subdivisions) {
    if (static_cast<int>(subdivisions.size()) != domain.dim())
        throw ConfigError("subdivision count must match domain dimension");
    for (int s : subdivisions)
        if (s < 1) throw ConfigError("subdivisions must be positive");
    return CubicalGrid{domain, subdivisions};
}

static void check_range(const CubicalGrid& grid, const CellIndex& cell) {
    if (!grid.in_range(cell)) throw std::out_of_range("cell index out of grid range");
}

Box cell_realization(const CubicalGrid& grid, const CellIndex& cell) {
    check_range(grid, cell);
    const int n = grid.dim();
    Vector lo(n), up(n);
    const Vector w = grid.cell_widths();
    for (int d = 0; d < n; ++d) {
        const int i = cell.multi_index[d];
        lo[d] = grid.domain.lower[d] + i * w[d];
        up[d] = (i + 1 == grid.subdivisions[d]) ? grid.domain.upper[d]
                                                : grid.domain.lower[d] + (i + 1) * w[d];
    }
    return Box{lo, up};
}

std::vector<Vector> cell_vertices(const CubicalGrid& grid, const CellIndex& cell) {
    const Box box = cell_realization(grid, cell);
    const int n = grid.dim();
    std::vector<Vector> verts;
    verts.reserve(std::size_t{1} << n);
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Vector v(n);
        for (int d = 0; d < n; ++d) v[d] = (bits >> d) & 1u ? box.upper[d] : box.lower[d];
        verts.push_back(std::move(v));
    }
    return verts;
}

Vector cell_center(const CubicalGrid& grid, const CellIndex& cell) {
    const Box box = cell_realization(grid, cell);
    return 0.5 * (box.lower + box.upper);
}

CellIntersection cells_intersecting(const CubicalGrid& grid, const Box& query) {
    const int n = grid.dim();
    if (query.dim() != n) throw ConfigError("query box dimension mismatch");
    CellIntersection out;
    const Vector w = grid.cell_widths();
    std::vector<int> lo(n), hi(n);
    for (int d = 0; d < n; ++d) {
        if (query.lower[d] < grid.domain.lower[d] || query.upper[d] > grid.domain.upper[d])
            out.query_escapes_domain = true;
        if (query.upper[d] < grid.domain.lower[d] || query.lower[d] > grid.domain.upper[d])
            return out;  // disjoint from the domain on this axis
        // Closed-box semantics: cell i intersects iff lower_i <= q_up and upper_i >= q_lo.
        const double nd = grid.subdivisions[d];
        double a = std::clamp((query.lower[d] - grid.domain.lower[d]) / w[d], -1.0, nd + 1);
        double b = std::clamp((query.upper[d] - grid.domain.lower[d]) / w[d], -1.0, nd + 1);
        int ilo = static_cast<int>(std::floor(a));
        int ihi = static_cast<int>(std::floor(b));
        // A query face landing exactly on a grid plane touches the cell below it too.
        if (ilo >= 1 && grid.domain.lower[d] + ilo * w[d] >= query.lower[d]) --ilo;
        while (ilo + 1 < grid.subdivisions[d] &&
               grid.domain.lower[d] + (ilo + 1) * w[d] < query.lower[d])
            ++ilo;  // float-guard: never start below the true range
        lo[d] = std::clamp(ilo, 0, grid.subdivisions[d] - 1);
        hi[d] = std::clamp(ihi, 0, grid.subdivisions[d] - 1);
        while (hi[d] > lo[d] && grid.domain.lower[d] + hi[d] * w[d] > query.upper[d]) --hi[d];
    }
    std::vector<int> idx(lo);
    while (true) {
        out.cells.push_back(CellIndex{idx});
        int d = n - 1;
        while (d >= 0) {
            if (++idx[d] <= hi[d]) break;
            idx[d] = lo[d];
            --d;
        }
        if (d < 0) break;
    }
    return out;
}

double grid_diameter(const CubicalGrid& grid) { return grid.cell_widths().norm(); }

CellIndex locate_cell(const CubicalGrid& grid, const Vector& x) {
    if (!grid.domain.contains(x)) throw std::out_of_range("point outside grid domain");
    const int n = grid.dim();
    const Vector w = grid.cell_widths();
    CellIndex cell;
    cell.multi_index.assign(n, 0);
    for (int d = 0; d < n; ++d) {
        int i = static_cast<int>(std::floor((x[d] - grid.domain.lower[d]) / w[d]));
        cell.multi_index[d] = std::clamp(i, 0, grid.subdivisions[d] - 1);
    }
    return cell;
}

}  // namespace morseid
