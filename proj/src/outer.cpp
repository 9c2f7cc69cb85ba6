#include "morseid/outer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace morseid {

std::int64_t CellMap::edge_count() const {
    std::int64_t e = 0;
    for (const auto& row : images) e += static_cast<std::int64_t>(row.size());
    return e;
}

namespace {

// Images of every lattice vertex (cell corners are shared across cells, so we
// integrate each corner once). Row-major over (subdivisions + 1) per axis.
struct LatticeImages {
    std::vector<Vector> image;
    std::vector<bool> diverged;
    std::vector<int> dims;  // subdivisions + 1

    std::int64_t index_of(const std::vector<int>& v) const {
        std::int64_t idx = 0;
        for (std::size_t d = 0; d < dims.size(); ++d) idx = idx * dims[d] + v[d];
        return idx;
    }
};

LatticeImages integrate_lattice(const CubicalGrid& grid, const VectorField& field, double tau,
                                double h) {
    LatticeImages lat;
    const int n = grid.dim();
    lat.dims.resize(n);
    std::int64_t total = 1;
    for (int d = 0; d < n; ++d) {
        lat.dims[d] = grid.subdivisions[d] + 1;
        total *= lat.dims[d];
    }
    lat.image.resize(total);
    lat.diverged.assign(total, false);
    const Vector w = grid.cell_widths();
    std::vector<int> v(n, 0);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        Vector x(n);
        for (int d = 0; d < n; ++d)
            x[d] = (v[d] == grid.subdivisions[d]) ? grid.domain.upper[d]
                                                  : grid.domain.lower[d] + v[d] * w[d];
        try {
            lat.image[idx] = integrate(field, x, tau, h);
        } catch (const IntegrationDiverged&) {
            lat.diverged[idx] = true;
        }
        for (int d = n - 1; d >= 0; --d) {
            if (++v[d] < lat.dims[d]) break;
            v[d] = 0;
        }
    }
    return lat;
}

std::vector<std::int32_t> to_linear_sorted(const CubicalGrid& grid,
                                           const std::vector<CellIndex>& cells) {
    std::vector<std::int32_t> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(static_cast<std::int32_t>(grid.linear_index(c)));
    return out;  // cells_intersecting emits row-major order, already sorted
}

}  // namespace

CellMap bounding_box_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                         double inflation_eps, bool include_center) {
    if (inflation_eps < 0.0) throw ConfigError("bounding_box_map: inflation must be >= 0");
    const int n = grid.dim();
    const LatticeImages lat = integrate_lattice(grid, field, tau, h);

    CellMap map;
    map.grid = grid;
    map.method = "bounding_box";
    const std::int64_t total = grid.cell_count();
    map.images.resize(total);
    map.escapes.assign(total, false);

    std::vector<int> corner(n);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const CellIndex cell = grid.from_linear(idx);
        Vector lo, hi;
        bool diverged = false, first = true;
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            for (int d = 0; d < n; ++d)
                corner[d] = cell.multi_index[d] + (static_cast<int>(bits >> d) & 1);
            const std::int64_t vi = lat.index_of(corner);
            if (lat.diverged[vi]) {
                diverged = true;
                break;
            }
            const Vector& y = lat.image[vi];
            if (first) {
                lo = y;
                hi = y;
                first = false;
            } else {
                lo = lo.cwiseMin(y);
                hi = hi.cwiseMax(y);
            }
        }
        if (!diverged && include_center) {
            try {
                const Vector y = integrate(field, cell_center(grid, cell), tau, h);
                lo = lo.cwiseMin(y);
                hi = hi.cwiseMax(y);
            } catch (const IntegrationDiverged&) {
                diverged = true;
            }
        }
        if (diverged) {
            map.escapes[idx] = true;
            continue;  // empty in-domain image
        }
        const Box image_box{lo.array() - inflation_eps, hi.array() + inflation_eps};
        const CellIntersection hit = cells_intersecting(grid, image_box);
        map.images[idx] = to_linear_sorted(grid, hit.cells);
        map.escapes[idx] = hit.query_escapes_domain;
    }
    return map;
}

CellMap inflate_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                    double delta) {
    const double limit = grid_diameter(grid) / 2.0;
    if (delta < 0.0 || delta >= limit)
        throw ConfigError("inflate_map: delta must lie in [0, grid_diameter/2)");
    CellMap map = bounding_box_map(grid, field, tau, h, delta, true);
    map.method = "inflate";
    return map;
}

LipschitzEstimate estimate_lipschitz(const VectorField& field, const Box& domain, double tau,
                                     double h, int sample_pairs, std::uint64_t seed) {
    if (sample_pairs < 1000)
        throw ConfigError("estimate_lipschitz: need at least 1000 sample pairs");
    const int n = domain.dim();
    const double r = 1e-4 * domain.widths().maxCoeff();
    std::mt19937_64 rng(mix_seed(seed, 0x4c697073ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    LipschitzEstimate est;
    double max_ratio = 0.0;
    for (int s = 0; s < sample_pairs; ++s) {
        Vector x(n), u(n);
        for (int d = 0; d < n; ++d)
            x[d] = domain.lower[d] + r + unit(rng) * (domain.upper[d] - domain.lower[d] - 2 * r);
        do {
            for (int d = 0; d < n; ++d) u[d] = gauss(rng);
        } while (u.norm() < 1e-12);
        u /= u.norm();
        const Vector x2 = x + r * u;
        try {
            const Vector y1 = integrate(field, x, tau, h);
            const Vector y2 = integrate(field, x2, tau, h);
            max_ratio = std::max(max_ratio, (y1 - y2).norm() / r);
        } catch (const IntegrationDiverged&) {
            ++est.excluded;
        }
    }
    est.L = 1.1 * max_ratio;
    est.warning = est.excluded * 100 > sample_pairs;
    return est;
}

namespace {

// Cells meeting the closed Euclidean ball: box prefilter, then exact
// clamp-point distance test.
void collect_ball_cells(const CubicalGrid& grid, const Vector& center, double radius,
                        std::vector<std::int32_t>& out, bool& escapes) {
    const int n = grid.dim();
    const Box bb{center.array() - radius, center.array() + radius};
    const CellIntersection hit = cells_intersecting(grid, bb);
    if (hit.query_escapes_domain) escapes = true;
    for (const auto& cell : hit.cells) {
        const Box r = cell_realization(grid, cell);
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double c = std::clamp(center[d], r.lower[d], r.upper[d]);
            d2 += (center[d] - c) * (center[d] - c);
        }
        if (d2 <= radius * radius)
            out.push_back(static_cast<std::int32_t>(grid.linear_index(cell)));
    }
}

}  // namespace

CellMap lipschitz_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                      double L_tau) {
    if (!(L_tau > 0.0)) throw ConfigError("lipschitz_map: L must be positive");
    const int n = grid.dim();
    const double radius = L_tau * grid_diameter(grid) / 2.0;
    const LatticeImages lat = integrate_lattice(grid, field, tau, h);

    CellMap map;
    map.grid = grid;
    map.method = "lipschitz";
    const std::int64_t total = grid.cell_count();
    map.images.resize(total);
    map.escapes.assign(total, false);

    std::vector<int> corner(n);
    std::vector<std::int32_t> scratch;
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const CellIndex cell = grid.from_linear(idx);
        scratch.clear();
        bool diverged = false, escapes = false;
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            for (int d = 0; d < n; ++d)
                corner[d] = cell.multi_index[d] + (static_cast<int>(bits >> d) & 1);
            const std::int64_t vi = lat.index_of(corner);
            if (lat.diverged[vi]) {
                diverged = true;
                break;
            }
            collect_ball_cells(grid, lat.image[vi], radius, scratch, escapes);
        }
        if (diverged) {
            map.escapes[idx] = true;
            continue;
        }
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        map.images[idx] = scratch;
        map.escapes[idx] = escapes;
    }
    return map;
}

std::vector<std::pair<Vector, Vector>> make_flow_pairs(const TrajectoryDataset& data, double tau,
                                                       double t_tol) {
    std::map<int, std::vector<const TrajectorySample*>> by_traj;
    for (const auto& s : data.samples) by_traj[s.traj_id].push_back(&s);
    std::vector<std::pair<Vector, Vector>> pairs;
    for (auto& [id, samples] : by_traj) {
        std::sort(samples.begin(), samples.end(),
                  [](const auto* a, const auto* b) { return a->t < b->t; });
        std::size_t j = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double target = samples[i]->t + tau;
            while (j < samples.size() && samples[j]->t < target - t_tol) ++j;
            if (j < samples.size() && std::abs(samples[j]->t - target) <= t_tol)
                pairs.push_back({samples[i]->x, samples[j]->x});
        }
    }
    return pairs;
}

namespace {

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double length_scale, double signal_var) {
    Matrix K(a.rows(), b.rows());
    const double inv = 1.0 / (2.0 * length_scale * length_scale);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j)
            K(i, j) = signal_var * std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
    return K;
}

double nlml_for(const Matrix& X, const Vector& y, const GpHyper& hp) {
    const int m = static_cast<int>(X.rows());
    Matrix K = rbf_kernel(X, X, hp.length_scale, hp.signal_var);
    K.diagonal().array() += hp.noise_var + hp.jitter;
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Vector alpha = llt.solve(y);
    double logdet = 0.0;
    const Matrix L = llt.matrixL();
    for (int i = 0; i < m; ++i) logdet += std::log(L(i, i));
    return 0.5 * y.dot(alpha) + logdet + 0.5 * m * std::log(2.0 * M_PI);
}

}  // namespace

GpModel fit_gp(const std::vector<std::pair<Vector, Vector>>& pairs, const GpFitOptions& options) {
    if (pairs.size() < 20) throw ConfigError("fit_gp: need at least 20 training pairs");
    const int n = static_cast<int>(pairs[0].first.size());

    // Deterministic stride subsample to the training cap.
    std::vector<int> take;
    const int total = static_cast<int>(pairs.size());
    if (total <= options.max_train) {
        take.resize(total);
        for (int i = 0; i < total; ++i) take[i] = i;
    } else {
        take.reserve(options.max_train);
        for (int i = 0; i < options.max_train; ++i)
            take.push_back(static_cast<int>(static_cast<std::int64_t>(i) * total /
                                            options.max_train));
    }
    const int m = static_cast<int>(take.size());

    GpModel gp;
    gp.train_x.resize(m, n);
    gp.train_y.resize(m, n);
    for (int i = 0; i < m; ++i) {
        gp.train_x.row(i) = pairs[take[i]].first.transpose();
        gp.train_y.row(i) = pairs[take[i]].second.transpose();
    }
    gp.y_mean = gp.train_y.colwise().mean();

    // Median pairwise distance on a stride subset anchors the length scale.
    double med = 1.0;
    {
        const int ms = std::min(m, 200);
        std::vector<double> d;
        for (int i = 0; i < ms; ++i)
            for (int j = i + 1; j < ms; ++j)
                d.push_back((gp.train_x.row(i * m / ms) - gp.train_x.row(j * m / ms)).norm());
        if (!d.empty()) {
            std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
            med = std::max(d[d.size() / 2], 1e-6);
        }
    }

    const int msub = std::min(m, options.hyper_subset);
    Matrix Xsub(msub, n);
    for (int i = 0; i < msub; ++i)
        Xsub.row(i) = gp.train_x.row(static_cast<int>(static_cast<std::int64_t>(i) * m / msub));

    const double ls_mult[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    const double sv_mult[] = {0.5, 1.0, 2.0};
    const double nv_mult[] = {1e-8, 1e-6, 1e-4, 1e-2};

    for (int dim = 0; dim < n; ++dim) {
        Vector y = gp.train_y.col(dim).array() - gp.y_mean[dim];
        Vector ysub(msub);
        for (int i = 0; i < msub; ++i)
            ysub[i] = y[static_cast<int>(static_cast<std::int64_t>(i) * m / msub)];
        const double var_t = std::max(ysub.squaredNorm() / msub, 1e-12);

        GpHyper best;
        best.nlml = std::numeric_limits<double>::infinity();
        for (double lm : ls_mult)
            for (double sm : sv_mult)
                for (double nm : nv_mult) {
                    GpHyper hp;
                    hp.length_scale = lm * med;
                    hp.signal_var = sm * var_t;
                    hp.noise_var = nm * var_t;
                    hp.nlml = nlml_for(Xsub, ysub, hp);
                    if (hp.nlml < best.nlml) best = hp;
                }
        if (!std::isfinite(best.nlml))
            throw NumericalError("fit_gp: marginal likelihood search failed");

        // Final factorization on the full training set with jitter escalation.
        Matrix K = rbf_kernel(gp.train_x, gp.train_x, best.length_scale, best.signal_var);
        Eigen::LLT<Matrix> llt;
        double jitter = 0.0;
        for (double j = 1e-12;; j *= 10.0) {
            Matrix Kj = K;
            Kj.diagonal().array() += best.noise_var + jitter;
            llt.compute(Kj);
            if (llt.info() == Eigen::Success) break;
            jitter = j;
            if (jitter > options.max_jitter)
                throw NumericalError("fit_gp: kernel matrix is not positive definite");
        }
        best.jitter = jitter;
        gp.hyper.push_back(best);
        gp.chol_lower.push_back(llt.matrixL());
        gp.alpha.push_back(llt.solve(y));
    }
    return gp;
}

void gp_predict(const GpModel& gp, const Matrix& queries, Matrix& mean, Matrix& stddev) {
    const int q = static_cast<int>(queries.rows());
    const int n = gp.input_dim();
    mean.resize(q, n);
    stddev.resize(q, n);
    for (int dim = 0; dim < n; ++dim) {
        const auto& hp = gp.hyper[dim];
        const Matrix Kq = rbf_kernel(gp.train_x, queries, hp.length_scale, hp.signal_var);
        mean.col(dim) = Kq.transpose() * gp.alpha[dim];
        mean.col(dim).array() += gp.y_mean[dim];
        const Matrix V =
            gp.chol_lower[dim].triangularView<Eigen::Lower>().solve(Kq);  // m x q
        for (int i = 0; i < q; ++i) {
            const double var = hp.signal_var - V.col(i).squaredNorm();
            stddev(i, dim) = std::sqrt(std::max(var, 0.0));
        }
    }
}

double normal_quantile_two_sided(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ConfigError("confidence must lie in (0, 1)");
    const double target = 0.5 * (1.0 + confidence);  // Phi(z) target
    double z = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double phi = 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
        const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        const double step = (phi - target) / std::max(pdf, 1e-300);
        z -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return z;
}

CellMap gp_map(const CubicalGrid& grid, const GpModel& gp, double confidence) {
    const int n = grid.dim();
    if (gp.input_dim() != n) throw ConfigError("gp_map: model dimension mismatch");
    const double z = normal_quantile_two_sided(confidence);

    // Batch predictions: means at every lattice vertex, mean+std at centers.
    std::int64_t lattice_total = 1;
    std::vector<int> dims(n);
    for (int d = 0; d < n; ++d) {
        dims[d] = grid.subdivisions[d] + 1;
        lattice_total *= dims[d];
    }
    const Vector w = grid.cell_widths();
    Matrix lattice_pts(lattice_total, n);
    {
        std::vector<int> v(n, 0);
        for (std::int64_t idx = 0; idx < lattice_total; ++idx) {
            for (int d = 0; d < n; ++d)
                lattice_pts(idx, d) = (v[d] == grid.subdivisions[d])
                                          ? grid.domain.upper[d]
                                          : grid.domain.lower[d] + v[d] * w[d];
            for (int d = n - 1; d >= 0; --d) {
                if (++v[d] < dims[d]) break;
                v[d] = 0;
            }
        }
    }
    Matrix vert_mean, vert_std;
    gp_predict(gp, lattice_pts, vert_mean, vert_std);

    const std::int64_t total = grid.cell_count();
    Matrix centers(total, n);
    for (std::int64_t idx = 0; idx < total; ++idx)
        centers.row(idx) = cell_center(grid, grid.from_linear(idx)).transpose();
    Matrix c_mean, c_std;
    gp_predict(gp, centers, c_mean, c_std);

    CellMap map;
    map.grid = grid;
    map.method = "gp";
    map.images.resize(total);
    map.escapes.assign(total, false);

    auto lattice_index = [&](const std::vector<int>& v) {
        std::int64_t idx = 0;
        for (int d = 0; d < n; ++d) idx = idx * dims[d] + v[d];
        return idx;
    };

    std::vector<int> corner(n);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const CellIndex cell = grid.from_linear(idx);
        Vector lo = Vector::Constant(n, std::numeric_limits<double>::infinity());
        Vector hi = -lo;
        for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
            for (int d = 0; d < n; ++d)
                corner[d] = cell.multi_index[d] + (static_cast<int>(bits >> d) & 1);
            const std::int64_t vi = lattice_index(corner);
            lo = lo.cwiseMin(vert_mean.row(vi).transpose());
            hi = hi.cwiseMax(vert_mean.row(vi).transpose());
        }
        bool escapes = false;
        std::vector<std::int32_t> cells;
        {
            const Box rbox{lo, hi};
            const CellIntersection hit = cells_intersecting(grid, rbox);
            if (hit.query_escapes_domain) escapes = true;
            cells = to_linear_sorted(grid, hit.cells);
        }
        {
            const Vector m = c_mean.row(idx).transpose();
            const Vector s = c_std.row(idx).transpose();
            const Box ebox{m - z * s, m + z * s};
            const CellIntersection hit = cells_intersecting(grid, ebox);
            if (hit.query_escapes_domain) escapes = true;
            std::vector<std::int32_t> extra = to_linear_sorted(grid, hit.cells);
            std::vector<std::int32_t> merged;
            std::set_union(cells.begin(), cells.end(), extra.begin(), extra.end(),
                           std::back_inserter(merged));
            cells = std::move(merged);
        }
        map.images[idx] = std::move(cells);
        map.escapes[idx] = escapes;
    }
    return map;
}

}  // namespace morseid
