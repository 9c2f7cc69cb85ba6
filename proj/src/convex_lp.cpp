#include <algorithm>
#include <cstdio>
#include <cmath>
#include <sstream>

#include "morseid/convex.hpp"

namespace morseid {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::MaxIter: return "max_iter";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard form assembled from the user LP:
//   min c.x  s.t.  A x = b,  l <= x <= u,
// with one slack per inequality row and fully-free variables split into
// positive/negative parts so every variable carries at least one finite bound.
struct StandardLp {
    int m = 0;      // rows
    int n = 0;      // columns (original + splits + slacks)
    int n_user = 0;
    Vector c, b, lo, hi;
    double fixed_cost = 0.0;
    // Column-compressed storage; columns touching a single row are the common
    // case (slacks and l1 residuals) and drive the normal-equation shortcut.
    std::vector<std::vector<int>> col_rows;
    std::vector<std::vector<double>> col_vals;
    std::vector<int> split_neg;   // per user var: column index of the negative part, or -1
    std::vector<int> user_col;    // per user var: column index, or -1 when fixed
    std::vector<double> fixed_at; // value of fixed variables

    void add_entry(int col, int row, double v) {
        if (v == 0.0) return;
        col_rows[col].push_back(row);
        col_vals[col].push_back(v);
    }

    Vector mat_vec(const Vector& x) const {
        Vector y = Vector::Zero(m);
        for (int j = 0; j < n; ++j)
            for (std::size_t k = 0; k < col_rows[j].size(); ++k)
                y[col_rows[j][k]] += col_vals[j][k] * x[j];
        return y;
    }

    Vector mat_t_vec(const Vector& y) const {
        Vector x = Vector::Zero(n);
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < col_rows[j].size(); ++k)
                acc += col_vals[j][k] * y[col_rows[j][k]];
            x[j] = acc;
        }
        return x;
    }
};

StandardLp build_standard(const LinearProgram& lp) {
    const int nu = lp.num_vars();
    if (!lp.bounds.empty() && static_cast<int>(lp.bounds.size()) != nu)
        throw ConfigError("lp bounds size does not match variable count");
    for (const auto& row : lp.constraints)
        if (row.a.size() != nu) throw ConfigError("lp row arity does not match objective");

    StandardLp s;
    s.n_user = nu;
    s.m = static_cast<int>(lp.constraints.size());
    s.split_neg.assign(nu, -1);
    s.user_col.assign(nu, -1);
    s.fixed_at.assign(nu, 0.0);

    std::vector<VarBound> bounds(nu);
    if (!lp.bounds.empty()) bounds = lp.bounds;
    std::vector<bool> fixed(nu, false);
    for (int j = 0; j < nu; ++j) {
        if (bounds[j].lo > bounds[j].hi) throw ConfigError("lp has an empty variable bound");
        // Pinned variables are substituted out; the barrier needs interior room.
        if (bounds[j].lo > -kInf && bounds[j].hi < kInf &&
            bounds[j].hi - bounds[j].lo <= 1e-14 * std::max(1.0, std::abs(bounds[j].lo))) {
            fixed[j] = true;
            s.fixed_at[j] = bounds[j].lo;
            s.fixed_cost += lp.objective[j] * bounds[j].lo;
        }
    }

    int n = 0;
    for (int j = 0; j < nu; ++j)
        if (!fixed[j]) s.user_col[j] = n++;
    for (int j = 0; j < nu; ++j)
        if (!fixed[j] && bounds[j].lo == -kInf && bounds[j].hi == kInf) s.split_neg[j] = n++;
    const int first_slack = n;
    for (const auto& row : lp.constraints)
        if (row.rel != Rel::EQ) ++n;

    s.n = n;
    s.c = Vector::Zero(n);
    s.b = Vector::Zero(s.m);
    s.lo = Vector::Constant(n, -kInf);
    s.hi = Vector::Constant(n, kInf);
    s.col_rows.resize(n);
    s.col_vals.resize(n);

    for (int j = 0; j < nu; ++j) {
        if (fixed[j]) continue;
        const int col = s.user_col[j];
        s.c[col] = lp.objective[j];
        if (s.split_neg[j] >= 0) {
            s.lo[col] = 0.0;
            s.lo[s.split_neg[j]] = 0.0;
            s.c[s.split_neg[j]] = -lp.objective[j];
        } else {
            s.lo[col] = bounds[j].lo;
            s.hi[col] = bounds[j].hi;
        }
    }

    int slack = first_slack;
    for (int i = 0; i < s.m; ++i) {
        const auto& row = lp.constraints[i];
        double rhs = row.rhs;
        for (int j = 0; j < nu; ++j) {
            if (row.a[j] == 0.0) continue;
            if (fixed[j]) {
                rhs -= row.a[j] * s.fixed_at[j];
                continue;
            }
            s.add_entry(s.user_col[j], i, row.a[j]);
            if (s.split_neg[j] >= 0) s.add_entry(s.split_neg[j], i, -row.a[j]);
        }
        s.b[i] = rhs;
        if (row.rel == Rel::LE) {
            s.add_entry(slack, i, 1.0);
            s.lo[slack] = 0.0;
            ++slack;
        } else if (row.rel == Rel::GE) {
            s.add_entry(slack, i, -1.0);
            s.lo[slack] = 0.0;
            ++slack;
        }
    }
    return s;
}

// Solves the per-iteration KKT step
//   [-diag(d)  A^T] [dx]   [rhat]
//   [   A       0 ] [dy] = [rb]
// three ways: full augmented factorization when small (best conditioned),
// normal equations with a Woodbury split when nearly all columns touch a
// single row (the l1/hinge workloads), dense normal equations otherwise.
struct KktSolver {
    const StandardLp& s;
    std::vector<int> dense_cols;
    bool use_woodbury = false;
    bool use_augmented = false;
    Matrix U;  // m x k gathered dense columns
    Eigen::FullPivLU<Matrix> aug_lu;
    Eigen::LLT<Matrix> dense_llt;
    Eigen::LLT<Matrix> core_llt;
    Vector diag;   // current diagonal of A D A^T from singleton columns
    Vector d_cur;  // current complementarity scaling (z/p + w/q per column)

    explicit KktSolver(const StandardLp& lp) : s(lp) {
        for (int j = 0; j < s.n; ++j)
            if (s.col_rows[j].size() > 1) dense_cols.push_back(j);
        const int k = static_cast<int>(dense_cols.size());
        std::vector<char> covered(std::max(s.m, 1), 0);
        for (int j = 0; j < s.n; ++j)
            if (s.col_rows[j].size() == 1) covered[s.col_rows[j][0]] = 1;
        bool all_rows_covered = true;
        for (int i = 0; i < s.m; ++i)
            if (!covered[i]) all_rows_covered = false;
        use_woodbury = all_rows_covered && k <= 64 && s.m > 2 * k;
        if (!use_woodbury) use_augmented = s.n + s.m <= 600;
        if (use_woodbury) {
            U = Matrix::Zero(s.m, k);
            for (int t = 0; t < k; ++t) {
                const int j = dense_cols[t];
                for (std::size_t r = 0; r < s.col_rows[j].size(); ++r)
                    U(s.col_rows[j][r], t) = s.col_vals[j][r];
            }
        }
    }

    void factor(const Vector& d) {
        d_cur = d;
        if (s.m == 0) return;
        if (use_augmented) {
            Matrix K = Matrix::Zero(s.n + s.m, s.n + s.m);
            for (int j = 0; j < s.n; ++j) {
                K(j, j) = -d[j];
                for (std::size_t r = 0; r < s.col_rows[j].size(); ++r) {
                    K(s.n + s.col_rows[j][r], j) = s.col_vals[j][r];
                    K(j, s.n + s.col_rows[j][r]) = s.col_vals[j][r];
                }
            }
            aug_lu.compute(K);
            return;
        }
        if (use_woodbury) {
            diag = Vector::Zero(s.m);
            for (int j = 0; j < s.n; ++j)
                if (s.col_rows[j].size() == 1) {
                    const int i = s.col_rows[j][0];
                    diag[i] += s.col_vals[j][0] * s.col_vals[j][0] / d[j];
                }
            const int k = static_cast<int>(dense_cols.size());
            // core = diag(d_dense) + U^T S^-1 U
            Matrix core = Matrix::Zero(k, k);
            for (int t = 0; t < k; ++t) core(t, t) = d[dense_cols[t]];
            Matrix SU = U;
            for (int i = 0; i < s.m; ++i) SU.row(i) /= std::max(diag[i], 1e-300);
            core.noalias() += U.transpose() * SU;
            core_llt.compute(core);
            for (double jitter = 1e-14; core_llt.info() != Eigen::Success && jitter < 1e-4;
                 jitter *= 100.0) {
                Matrix bumped = core;
                bumped.diagonal().array() += jitter * core.diagonal().cwiseAbs().mean();
                core_llt.compute(bumped);
            }
        } else {
            Matrix dense_m = Matrix::Zero(s.m, s.m);
            for (int j = 0; j < s.n; ++j) {
                const auto& rows = s.col_rows[j];
                const auto& vals = s.col_vals[j];
                for (std::size_t a = 0; a < rows.size(); ++a)
                    for (std::size_t bb = 0; bb < rows.size(); ++bb)
                        dense_m(rows[a], rows[bb]) += vals[a] * vals[bb] / d[j];
            }
            dense_llt.compute(dense_m);
            for (double jitter = 1e-14; dense_llt.info() != Eigen::Success && jitter < 1e-4;
                 jitter *= 100.0) {
                Matrix bumped = dense_m;
                bumped.diagonal().array() += jitter * dense_m.diagonal().cwiseAbs().mean();
                dense_llt.compute(bumped);
            }
        }
    }

    Vector normal_apply(const Vector& v) const {  // (A diag(1/d) A^T) v
        Vector t = s.mat_t_vec(v);
        return s.mat_vec(t.cwiseQuotient(d_cur));
    }

    Vector normal_solve_once(const Vector& r) const {
        if (use_woodbury) {
            Vector sr = r.array() / diag.array().max(1e-300);
            Vector t = core_llt.solve(U.transpose() * sr);
            return sr - (U * t).cwiseQuotient(diag.cwiseMax(1e-300));
        }
        return dense_llt.solve(r);
    }

    // Single structured solve of the augmented system; dense-column steps come
    // straight out of the core factorization so no tiny scaling divides them.
    std::pair<Vector, Vector> solve_structured_once(const Vector& rhat, const Vector& rb) const {
        const int k = static_cast<int>(dense_cols.size());
        Vector rs_scaled = Vector::Zero(s.n);
        for (int j = 0; j < s.n; ++j)
            if (s.col_rows[j].size() == 1) rs_scaled[j] = rhat[j] / d_cur[j];
        const Vector t = rb + s.mat_vec(rs_scaled);
        const Vector st = t.cwiseQuotient(diag.cwiseMax(1e-300));
        Vector rhs_core(k);
        for (int c = 0; c < k; ++c) rhs_core[c] = -rhat[dense_cols[c]];
        rhs_core.noalias() += U.transpose() * st;
        const Vector dxd = core_llt.solve(rhs_core);
        const Vector dy = (t - U * dxd).cwiseQuotient(diag.cwiseMax(1e-300));
        Vector dx(s.n);
        const Vector aty = s.mat_t_vec(dy);
        for (int j = 0; j < s.n; ++j)
            dx[j] = s.col_rows[j].size() == 1 ? (aty[j] - rhat[j]) / d_cur[j] : 0.0;
        for (int c = 0; c < k; ++c) dx[dense_cols[c]] = dxd[c];
        return {dx, dy};
    }

    // Returns (dx, dy).
    std::pair<Vector, Vector> solve(const Vector& rhat, const Vector& rb) const {
        if (s.m == 0)
            return {Vector(-rhat.cwiseQuotient(d_cur)), Vector()};
        if (use_augmented) {
            Vector rhs(s.n + s.m);
            rhs.head(s.n) = rhat;
            rhs.tail(s.m) = rb;
            const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
            Vector sol = aug_lu.solve(rhs);
            Vector dx = sol.head(s.n), dy = sol.tail(s.m);
            double prev = kInf;
            for (int pass = 0; pass < 6; ++pass) {
                Vector res(s.n + s.m);
                res.head(s.n) = rhat + d_cur.cwiseProduct(dx) - s.mat_t_vec(dy);
                res.tail(s.m) = rb - s.mat_vec(dx);
                const double rn = res.lpNorm<Eigen::Infinity>();
                if (rn < 1e-13 * scale || rn > 0.5 * prev) break;
                prev = rn;
                Vector corr = aug_lu.solve(res);
                dx += corr.head(s.n);
                dy += corr.tail(s.m);
            }
            return {dx, dy};
        }
        if (use_woodbury) {
            auto [dx, dy] = solve_structured_once(rhat, rb);
            const double scale = 1.0 + std::max(rhat.lpNorm<Eigen::Infinity>(),
                                                rb.lpNorm<Eigen::Infinity>());
            double prev = kInf;
            for (int pass = 0; pass < 6; ++pass) {
                Vector res_top = rhat + d_cur.cwiseProduct(dx) - s.mat_t_vec(dy);
                Vector res_bot = rb - s.mat_vec(dx);
                const double rn =
                    std::max(res_top.lpNorm<Eigen::Infinity>(), res_bot.lpNorm<Eigen::Infinity>());
                if (rn < 1e-13 * scale || rn > 0.5 * prev) break;
                prev = rn;
                auto [cx, cy] = solve_structured_once(res_top, res_bot);
                dx += cx;
                dy += cy;
            }
            return {dx, dy};
        }
        Vector rhs = rb + s.mat_vec(rhat.cwiseQuotient(d_cur));
        Vector dy = normal_solve_once(rhs);
        for (int pass = 0; pass < 4; ++pass) {
            Vector res = rhs - normal_apply(dy);
            if (res.lpNorm<Eigen::Infinity>() < 1e-13 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
                break;
            dy += normal_solve_once(res);
        }
        Vector dx = (s.mat_t_vec(dy) - rhat).cwiseQuotient(d_cur);
        return {dx, dy};
    }
};

struct Iterate {
    Vector x, y, z, w;  // z: lower-bound duals, w: upper-bound duals
};

}  // namespace

SolveReport solve_lp(const LinearProgram& lp, double tol, int max_iter) {
    StandardLp s = build_standard(lp);
    const int n = s.n, m = s.m;

    std::vector<int> low_idx, up_idx;
    for (int j = 0; j < n; ++j) {
        if (s.lo[j] > -kInf) low_idx.push_back(j);
        if (s.hi[j] < kInf) up_idx.push_back(j);
    }
    const int nb = static_cast<int>(low_idx.size() + up_idx.size());
    if (nb == 0) throw ConfigError("lp must have at least one bounded variable or inequality");

    Iterate it;
    it.x.resize(n);
    for (int j = 0; j < n; ++j) {
        const bool has_lo = s.lo[j] > -kInf, has_hi = s.hi[j] < kInf;
        if (has_lo && has_hi) it.x[j] = 0.5 * (s.lo[j] + s.hi[j]);
        else if (has_lo) it.x[j] = s.lo[j] + 1.0;
        else it.x[j] = s.hi[j] - 1.0;
    }
    it.y = Vector::Zero(m);
    it.z = Vector::Ones(low_idx.size());
    it.w = Vector::Ones(up_idx.size());

    KktSolver kkt(s);
    SolveReport rep;

    const double bnorm = m > 0 ? s.b.lpNorm<Eigen::Infinity>() : 0.0;
    const double cnorm = s.c.lpNorm<Eigen::Infinity>();

    auto primal_obj = [&] { return s.c.dot(it.x); };
    auto dual_obj = [&] {
        double v = m > 0 ? s.b.dot(it.y) : 0.0;
        for (std::size_t k = 0; k < low_idx.size(); ++k) v += s.lo[low_idx[k]] * it.z[k];
        for (std::size_t k = 0; k < up_idx.size(); ++k) v -= s.hi[up_idx[k]] * it.w[k];
        return v;
    };

    int iter = 0;
    double best_score = kInf;
    Iterate best = it;
    for (; iter < max_iter; ++iter) {
        Vector p(low_idx.size()), q(up_idx.size());
        for (std::size_t k = 0; k < low_idx.size(); ++k) p[k] = it.x[low_idx[k]] - s.lo[low_idx[k]];
        for (std::size_t k = 0; k < up_idx.size(); ++k) q[k] = s.hi[up_idx[k]] - it.x[up_idx[k]];

        Vector rb = m > 0 ? Vector(s.b - s.mat_vec(it.x)) : Vector();
        Vector rc = s.c - (m > 0 ? s.mat_t_vec(it.y) : Vector::Zero(n));
        for (std::size_t k = 0; k < low_idx.size(); ++k) rc[low_idx[k]] -= it.z[k];
        for (std::size_t k = 0; k < up_idx.size(); ++k) rc[up_idx[k]] += it.w[k];

        const double mu = (p.dot(it.z) + q.dot(it.w)) / nb;
        const double pinf = m > 0 ? rb.lpNorm<Eigen::Infinity>() / (1.0 + bnorm) : 0.0;
        const double dinf = rc.lpNorm<Eigen::Infinity>() / (1.0 + cnorm);
        const double pobj = primal_obj(), dobj = dual_obj();
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

        const double score = std::max({pinf, dinf, relgap});
        if (score < best_score) {
            best_score = score;
            best = it;
        }

        if (pinf <= tol && dinf <= tol && relgap <= tol) {
            rep.status = SolveStatus::Optimal;
            break;
        }
        if (pinf <= 1e2 * tol && pobj < -1e9 * (1.0 + cnorm)) {
            rep.status = SolveStatus::Unbounded;
            break;
        }
        if (dinf <= 1e2 * tol && dobj > 1e9 * (1.0 + bnorm)) {
            rep.status = SolveStatus::Infeasible;
            break;
        }
        // Farkas ray: (y,z,w) with A^T y + z - w ~ 0 and positive value
        // certifies primal infeasibility once the primal residual is stuck.
        if (pinf > 1e2 * tol && dobj > 1e3 * (1.0 + bnorm)) {
            const double hres = (s.c - rc).lpNorm<Eigen::Infinity>();
            if (hres <= 1e-5 * dobj) {
                rep.status = SolveStatus::Infeasible;
                break;
            }
        }
        if (mu < 1e-25) {
            ++iter;
            break;  // complementarity exhausted; classify via best iterate
        }

        Vector d = Vector::Zero(n);
        for (std::size_t k = 0; k < low_idx.size(); ++k) d[low_idx[k]] += it.z[k] / p[k];
        for (std::size_t k = 0; k < up_idx.size(); ++k) d[up_idx[k]] += it.w[k] / q[k];
        kkt.factor(d);

        auto solve_direction = [&](const Vector& rpz, const Vector& rqw, Vector& dx, Vector& dy,
                                   Vector& dz, Vector& dw) {
            Vector rhat = rc;
            for (std::size_t k = 0; k < low_idx.size(); ++k) rhat[low_idx[k]] -= rpz[k] / p[k];
            for (std::size_t k = 0; k < up_idx.size(); ++k) rhat[up_idx[k]] += rqw[k] / q[k];
            std::tie(dx, dy) = kkt.solve(rhat, rb);
            dz.resize(low_idx.size());
            dw.resize(up_idx.size());
            for (std::size_t k = 0; k < low_idx.size(); ++k)
                dz[k] = (rpz[k] - it.z[k] * dx[low_idx[k]]) / p[k];
            for (std::size_t k = 0; k < up_idx.size(); ++k)
                dw[k] = (rqw[k] + it.w[k] * dx[up_idx[k]]) / q[k];
        };

        auto step_limits = [&](const Vector& dx, const Vector& dz, const Vector& dw) {
            double ap = 1e30, ad = 1e30;
            for (std::size_t k = 0; k < low_idx.size(); ++k) {
                if (dx[low_idx[k]] < 0.0) ap = std::min(ap, -p[k] / dx[low_idx[k]]);
                if (dz[k] < 0.0) ad = std::min(ad, -it.z[k] / dz[k]);
            }
            for (std::size_t k = 0; k < up_idx.size(); ++k) {
                if (dx[up_idx[k]] > 0.0) ap = std::min(ap, q[k] / dx[up_idx[k]]);
                if (dw[k] < 0.0) ad = std::min(ad, -it.w[k] / dw[k]);
            }
            return std::pair<double, double>(ap, ad);
        };

        // Predictor.
        Vector rpz = -p.cwiseProduct(it.z), rqw = -q.cwiseProduct(it.w);
        Vector dx, dy, dz, dw;
        solve_direction(rpz, rqw, dx, dy, dz, dw);
        auto [apa, ada] = step_limits(dx, dz, dw);
        const double ap_aff = std::min(1.0, apa), ad_aff = std::min(1.0, ada);
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < low_idx.size(); ++k)
            mu_aff += (p[k] + ap_aff * dx[low_idx[k]]) * (it.z[k] + ad_aff * dz[k]);
        for (std::size_t k = 0; k < up_idx.size(); ++k)
            mu_aff += (q[k] - ap_aff * dx[up_idx[k]]) * (it.w[k] + ad_aff * dw[k]);
        mu_aff /= nb;
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

        // Corrector.
        for (std::size_t k = 0; k < low_idx.size(); ++k)
            rpz[k] = sigma * mu - p[k] * it.z[k] - dx[low_idx[k]] * dz[k];
        for (std::size_t k = 0; k < up_idx.size(); ++k)
            rqw[k] = sigma * mu - q[k] * it.w[k] + dx[up_idx[k]] * dw[k];
        solve_direction(rpz, rqw, dx, dy, dz, dw);
        auto [apc, adc] = step_limits(dx, dz, dw);
        const double ap = std::min(1.0, 0.9995 * apc), ad = std::min(1.0, 0.9995 * adc);

        it.x += ap * dx;
        if (m > 0) it.y += ad * dy;
        it.z += ad * dz;
        it.w += ad * dw;
#ifdef MORSEID_LP_TRACE
        std::fprintf(stderr,
                     "it=%d mu=%.3e sigma=%.3e ap=%.3e ad=%.3e pinf=%.3e dinf=%.3e gap=%.3e\n",
                     iter, mu, sigma, ap, ad, pinf, dinf, relgap);
#endif
        if (ap < 1e-10 && ad < 1e-10) {
            ++iter;
            break;  // stalled; report best iterate
        }
        if (score <= 1e3 * tol) {
            // Endgame: stop on the first step that damages an almost-converged
            // iterate instead of grinding on noise-dominated directions.
            Vector rb2 = m > 0 ? Vector(s.b - s.mat_vec(it.x)) : Vector();
            const double pinf2 = m > 0 ? rb2.lpNorm<Eigen::Infinity>() / (1.0 + bnorm) : 0.0;
            if (pinf2 > 50.0 * std::max(pinf, tol)) {
                it.x -= ap * dx;
                if (m > 0) it.y -= ad * dy;
                it.z -= ad * dz;
                it.w -= ad * dw;
                ++iter;
                break;
            }
        }
    }

    if (rep.status != SolveStatus::Optimal && rep.status != SolveStatus::Unbounded &&
        rep.status != SolveStatus::Infeasible) {
        rep.status = SolveStatus::MaxIter;
        it = best;
    }

    // Recover user variables (undo fixes and free-variable splits).
    rep.primal.resize(s.n_user);
    for (int j = 0; j < s.n_user; ++j) {
        if (s.user_col[j] < 0) {
            rep.primal[j] = s.fixed_at[j];
        } else {
            const double base = it.x[s.user_col[j]];
            rep.primal[j] = s.split_neg[j] >= 0 ? base - it.x[s.split_neg[j]] : base;
        }
    }
    rep.objective = lp.objective.dot(rep.primal);
    rep.dual_objective = dual_obj();
    rep.iterations = iter;

    {
        Vector rb = m > 0 ? Vector(s.b - s.mat_vec(it.x)) : Vector();
        Vector rc = s.c - (m > 0 ? s.mat_t_vec(it.y) : Vector::Zero(n));
        for (std::size_t k = 0; k < low_idx.size(); ++k) rc[low_idx[k]] -= it.z[k];
        for (std::size_t k = 0; k < up_idx.size(); ++k) rc[up_idx[k]] += it.w[k];
        rep.kkt.primal_feas = m > 0 ? rb.lpNorm<Eigen::Infinity>() / (1.0 + bnorm) : 0.0;
        rep.kkt.dual_feas = rc.lpNorm<Eigen::Infinity>() / (1.0 + cnorm);
        rep.kkt.duality_gap =
            std::abs(rep.objective - rep.dual_objective) / (1.0 + std::abs(rep.objective));
    }
    return rep;
}

std::string dump_lp(const LinearProgram& lp) {
    std::ostringstream out;
    out << "min";
    for (int j = 0; j < lp.num_vars(); ++j) out << " " << format_double(lp.objective[j]);
    out << "\n";
    for (const auto& row : lp.constraints) {
        for (int j = 0; j < row.a.size(); ++j) out << format_double(row.a[j]) << " ";
        out << (row.rel == Rel::LE ? "<=" : row.rel == Rel::GE ? ">=" : "==") << " "
            << format_double(row.rhs) << "\n";
    }
    for (std::size_t j = 0; j < lp.bounds.size(); ++j)
        out << "x" << j << " in [" << format_double(lp.bounds[j].lo) << ", "
            << format_double(lp.bounds[j].hi) << "]\n";
    return out.str();
}

}  // namespace morseid
