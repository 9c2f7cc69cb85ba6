#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "morseid/convex.hpp"

namespace morseid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Product cone R+^l x PSD(d1) x ... ; orthant entries plus dense blocks.
struct ConeVec {
    Vector orth;
    std::vector<Matrix> mats;

    static ConeVec zeros_like(const ConeVec& o) {
        ConeVec v;
        v.orth = Vector::Zero(o.orth.size());
        for (const auto& M : o.mats) v.mats.push_back(Matrix::Zero(M.rows(), M.cols()));
        return v;
    }
};

double cone_dot(const ConeVec& a, const ConeVec& b) {
    double v = a.orth.size() > 0 ? a.orth.dot(b.orth) : 0.0;
    for (std::size_t k = 0; k < a.mats.size(); ++k)
        v += (a.mats[k].array() * b.mats[k].array()).sum();
    return v;
}

double cone_max_abs(const ConeVec& a) {
    double v = a.orth.size() > 0 ? a.orth.lpNorm<Eigen::Infinity>() : 0.0;
    for (const auto& M : a.mats) v = std::max(v, M.cwiseAbs().maxCoeff());
    return v;
}

// Conic reformulation of a SmallSdp:
//   min c.x   s.t.  A x = b,   G x + s = h,  s in K.
struct ConicProblem {
    int q = 0;
    Vector c;
    Matrix A;  // meq x q
    Vector b;
    Matrix Gl;  // l x q (orthant rows)
    Vector hl;
    std::vector<SdpBlock> blocks;
    int degree = 0;

    ConeVec h_cone() const {
        ConeVec h;
        h.orth = hl;
        for (const auto& blk : blocks) h.mats.push_back(blk.f0);
        return h;
    }

    ConeVec apply_g(const Vector& x) const {
        ConeVec g;
        g.orth = Gl.rows() > 0 ? Vector(Gl * x) : Vector();
        for (const auto& blk : blocks) {
            Matrix M = Matrix::Zero(blk.dim, blk.dim);
            for (const auto& [var, F] : blk.terms) M -= x[var] * F;
            g.mats.push_back(std::move(M));
        }
        return g;
    }

    Vector apply_gt(const ConeVec& z) const {
        Vector out = Gl.rows() > 0 ? Vector(Gl.transpose() * z.orth) : Vector::Zero(q);
        for (std::size_t k = 0; k < blocks.size(); ++k)
            for (const auto& [var, F] : blocks[k].terms)
                out[var] -= (F.array() * z.mats[k].array()).sum();
        return out;
    }
};

ConicProblem build_conic(const SmallSdp& sdp) {
    const int q = sdp.num_vars();
    if (!sdp.bounds.empty() && static_cast<int>(sdp.bounds.size()) != q)
        throw ConfigError("sdp bounds size does not match variable count");
    for (const auto& blk : sdp.blocks) {
        if (blk.dim > 16) throw ConfigError("sdp block exceeds the 16x16 limit");
        if (blk.f0.rows() != blk.dim || blk.f0.cols() != blk.dim)
            throw ConfigError("sdp block f0 has wrong shape");
        for (const auto& [var, F] : blk.terms) {
            if (var < 0 || var >= q) throw ConfigError("sdp block references unknown variable");
            if (F.rows() != blk.dim || F.cols() != blk.dim)
                throw ConfigError("sdp block term has wrong shape");
        }
    }

    ConicProblem cp;
    cp.q = q;
    cp.c = sdp.objective;
    cp.blocks = sdp.blocks;
    // Symmetrize the affine maps; callers specify upper triangles at will.
    for (auto& blk : cp.blocks) {
        blk.f0 = 0.5 * (blk.f0 + blk.f0.transpose()).eval();
        for (auto& [var, F] : blk.terms) F = 0.5 * (F + F.transpose()).eval();
    }

    int meq = 0, l = 0;
    for (const auto& row : sdp.constraints) {
        if (row.a.size() != q) throw ConfigError("sdp row arity mismatch");
        row.rel == Rel::EQ ? ++meq : ++l;
    }
    for (const auto& bd : sdp.bounds) {
        if (bd.lo > -kInf) ++l;
        if (bd.hi < kInf) ++l;
    }

    cp.A = Matrix::Zero(meq, q);
    cp.b = Vector::Zero(meq);
    cp.Gl = Matrix::Zero(l, q);
    cp.hl = Vector::Zero(l);
    int ie = 0, il = 0;
    for (const auto& row : sdp.constraints) {
        if (row.rel == Rel::EQ) {
            cp.A.row(ie) = row.a;
            cp.b[ie] = row.rhs;
            ++ie;
        } else if (row.rel == Rel::LE) {
            cp.Gl.row(il) = row.a;
            cp.hl[il] = row.rhs;
            ++il;
        } else {
            cp.Gl.row(il) = -row.a;
            cp.hl[il] = -row.rhs;
            ++il;
        }
    }
    for (std::size_t j = 0; j < sdp.bounds.size(); ++j) {
        if (sdp.bounds[j].lo > -kInf) {
            cp.Gl(il, static_cast<int>(j)) = -1.0;
            cp.hl[il] = -sdp.bounds[j].lo;
            ++il;
        }
        if (sdp.bounds[j].hi < kInf) {
            cp.Gl(il, static_cast<int>(j)) = 1.0;
            cp.hl[il] = sdp.bounds[j].hi;
            ++il;
        }
    }
    cp.degree = l;
    for (const auto& blk : cp.blocks) cp.degree += blk.dim;
    if (cp.degree == 0) throw ConfigError("sdp needs at least one cone constraint");
    return cp;
}

// Nesterov-Todd scaling of the product cone.
struct Scaling {
    Vector w;  // orthant
    Vector lambda_orth;
    std::vector<Matrix> r, rinv;
    std::vector<Vector> sigma;  // scaled eigenvalues per block

    // W(u): s-side scaling.
    ConeVec apply_w(const ConeVec& u) const {
        ConeVec out = u;
        out.orth = w.cwiseProduct(u.orth);
        for (std::size_t k = 0; k < r.size(); ++k) out.mats[k] = r[k] * u.mats[k] * r[k].transpose();
        return out;
    }
    ConeVec apply_winv(const ConeVec& u) const {
        ConeVec out = u;
        out.orth = u.orth.cwiseQuotient(w);
        for (std::size_t k = 0; k < r.size(); ++k)
            out.mats[k] = rinv[k] * u.mats[k] * rinv[k].transpose();
        return out;
    }
    ConeVec apply_wt(const ConeVec& u) const {
        ConeVec out = u;
        out.orth = w.cwiseProduct(u.orth);
        for (std::size_t k = 0; k < r.size(); ++k)
            out.mats[k] = r[k].transpose() * u.mats[k] * r[k];
        return out;
    }
    // (W W^T)^-1 via P = R R^T per block.
    ConeVec apply_hinv(const ConeVec& u) const {
        ConeVec out = u;
        out.orth = u.orth.cwiseQuotient(w.cwiseProduct(w));
        for (std::size_t k = 0; k < r.size(); ++k) {
            Matrix pinv = rinv[k].transpose() * rinv[k];
            out.mats[k] = pinv * u.mats[k] * pinv;
        }
        return out;
    }
};

bool compute_scaling(const ConeVec& s, const ConeVec& z, Scaling& W) {
    W.w = (s.orth.array() / z.orth.array()).sqrt();
    W.lambda_orth = (s.orth.array() * z.orth.array()).sqrt();
    W.r.clear();
    W.rinv.clear();
    W.sigma.clear();
    for (std::size_t k = 0; k < s.mats.size(); ++k) {
        Eigen::LLT<Matrix> ls(s.mats[k]), lz(z.mats[k]);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
        const Matrix Ls = ls.matrixL();
        const Matrix Lz = lz.matrixL();
        Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector sig = svd.singularValues();
        if (sig.minCoeff() <= 0.0) return false;
        const Vector isqrt = sig.array().sqrt().inverse();
        W.r.push_back(Ls * svd.matrixV() * isqrt.asDiagonal());
        W.rinv.push_back(isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose());
        W.sigma.push_back(sig);
    }
    return true;
}

// Max alpha with lam + alpha * u in the cone (lam the scaled point).
double max_step_scaled(const Scaling& W, const ConeVec& u) {
    double limit = kInf;
    for (int i = 0; i < u.orth.size(); ++i)
        if (u.orth[i] < 0.0) limit = std::min(limit, -W.lambda_orth[i] / u.orth[i]);
    for (std::size_t k = 0; k < u.mats.size(); ++k) {
        const Vector isq = W.sigma[k].array().sqrt().inverse();
        const Matrix M = isq.asDiagonal() * u.mats[k] * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues().minCoeff();
        if (lmin < 0.0) limit = std::min(limit, -1.0 / lmin);
    }
    return limit;
}

}  // namespace

SolveReport solve_sdp(const SmallSdp& sdp, double tol, int max_iter) {
    ConicProblem cp = build_conic(sdp);
    const int q = cp.q;
    const int meq = static_cast<int>(cp.A.rows());
    const ConeVec h = cp.h_cone();

    Vector x = Vector::Zero(q);
    Vector y = Vector::Zero(meq);
    ConeVec s, z;
    s.orth = Vector::Constant(cp.hl.size(), std::max(1.0, cp.hl.size() > 0
                                                              ? cp.hl.cwiseAbs().maxCoeff()
                                                              : 1.0));
    z.orth = Vector::Ones(cp.hl.size());
    for (const auto& blk : cp.blocks) {
        const double beta = std::max(1.0, blk.f0.cwiseAbs().maxCoeff() * blk.dim);
        s.mats.push_back(beta * Matrix::Identity(blk.dim, blk.dim));
        z.mats.push_back(Matrix::Identity(blk.dim, blk.dim));
    }

    const double bnorm = meq > 0 ? cp.b.lpNorm<Eigen::Infinity>() : 0.0;
    const double hnorm = std::max(cone_max_abs(h), 1e-30);
    const double cnorm = cp.c.lpNorm<Eigen::Infinity>();

    SolveReport rep;
    Vector best_x = x;
    double best_score = kInf, best_pobj = 0.0, best_dobj = 0.0;
    KktResiduals best_kkt;
    double cur_pobj = 0.0, cur_dobj = 0.0;
    KktResiduals cur_kkt;

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // Residuals.
        ConeVec gx = cp.apply_g(x);
        ConeVec rz = gx;  // rz = s + Gx - h
        rz.orth += s.orth - h.orth;
        for (std::size_t k = 0; k < rz.mats.size(); ++k) rz.mats[k] += s.mats[k] - h.mats[k];
        Vector rx = cp.c + cp.apply_gt(z);
        if (meq > 0) rx += cp.A.transpose() * y;
        Vector ry = meq > 0 ? Vector(cp.A * x - cp.b) : Vector();

        const double gap = cone_dot(s, z);
        const double mu = gap / cp.degree;
        const double pobj = cp.c.dot(x);
        const double dobj = -cone_dot(h, z) - (meq > 0 ? cp.b.dot(y) : 0.0);
        const double pres = std::max(meq > 0 ? ry.lpNorm<Eigen::Infinity>() / (1.0 + bnorm) : 0.0,
                                     cone_max_abs(rz) / (1.0 + hnorm));
        const double dres = rx.lpNorm<Eigen::Infinity>() / (1.0 + cnorm);
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

        cur_pobj = pobj;
        cur_dobj = dobj;
        cur_kkt = KktResiduals{pres, dres, relgap};
        const double score = std::max({pres, dres, relgap});
        if (score < best_score) {
            best_score = score;
            best_x = x;
            best_pobj = pobj;
            best_dobj = dobj;
            best_kkt = KktResiduals{pres, dres, relgap};
        }

        if (pres <= 0.1 * tol && dres <= tol && relgap <= tol) {
            rep.status = SolveStatus::Optimal;
            break;
        }
        if (pres <= 1e2 * tol && pobj < -1e9 * (1.0 + cnorm)) {
            rep.status = SolveStatus::Unbounded;
            break;
        }
        if (dres <= 1e2 * tol && dobj > 1e9 * (1.0 + bnorm + hnorm)) {
            rep.status = SolveStatus::Infeasible;
            break;
        }

        Scaling W;
        if (!compute_scaling(s, z, W)) break;  // cone interior lost numerically

        // lam o lam and helpers in scaled coordinates.
        auto lam_sq = [&]() {
            ConeVec v;
            v.orth = W.lambda_orth.cwiseProduct(W.lambda_orth);
            for (const auto& sig : W.sigma)
                v.mats.push_back(Vector(sig.array().square()).asDiagonal());
            return v;
        };
        auto lam_solve = [&](const ConeVec& d) {  // solve lam o out = d
            ConeVec out = d;
            out.orth = d.orth.cwiseQuotient(W.lambda_orth);
            for (std::size_t k = 0; k < d.mats.size(); ++k) {
                const Vector& sig = W.sigma[k];
                for (int i = 0; i < out.mats[k].rows(); ++i)
                    for (int j = 0; j < out.mats[k].cols(); ++j)
                        out.mats[k](i, j) = 2.0 * d.mats[k](i, j) / (sig[i] + sig[j]);
            }
            return out;
        };

        // Q = G^T (W W^T)^-1 G + tiny ridge, assembled densely (q is small).
        Matrix Q = Matrix::Zero(q, q);
        {
            const Vector wi2 = W.w.cwiseProduct(W.w).cwiseInverse();
            if (cp.Gl.rows() > 0)
                Q.noalias() += cp.Gl.transpose() * wi2.asDiagonal() * cp.Gl;
            for (std::size_t k = 0; k < cp.blocks.size(); ++k) {
                const Matrix pinv = W.rinv[k].transpose() * W.rinv[k];
                std::vector<Matrix> hi;
                hi.reserve(cp.blocks[k].terms.size());
                for (const auto& [var, F] : cp.blocks[k].terms) hi.push_back(pinv * F * pinv);
                for (std::size_t a = 0; a < cp.blocks[k].terms.size(); ++a)
                    for (std::size_t bb = 0; bb < cp.blocks[k].terms.size(); ++bb)
                        Q(cp.blocks[k].terms[a].first, cp.blocks[k].terms[bb].first) +=
                            (cp.blocks[k].terms[a].second.array() * hi[bb].array()).sum();
            }
        }
        Q.diagonal().array() += 1e-13 * (1.0 + Q.diagonal().cwiseAbs().maxCoeff());
        Matrix kkt = Matrix::Zero(q + meq, q + meq);
        kkt.topLeftCorner(q, q) = Q;
        if (meq > 0) {
            kkt.topRightCorner(q, meq) = cp.A.transpose();
            kkt.bottomLeftCorner(meq, q) = cp.A;
        }
        Eigen::FullPivLU<Matrix> lu(kkt);

        auto solve_dir = [&](const ConeVec& dc, Vector& dx, Vector& dy, ConeVec& ds, ConeVec& dz) {
            ConeVec wcc = W.apply_w(lam_solve(dc));
            ConeVec dzrhs = rz;  // d_z = -rz - W(lam^-1 dc)
            dzrhs.orth = -rz.orth - wcc.orth;
            for (std::size_t k = 0; k < dzrhs.mats.size(); ++k)
                dzrhs.mats[k] = -rz.mats[k] - wcc.mats[k];
            Vector rhs(q + meq);
            rhs.head(q) = -rx + cp.apply_gt(W.apply_hinv(dzrhs));
            if (meq > 0) rhs.tail(meq) = -ry;
            Vector sol = lu.solve(rhs);
            dx = sol.head(q);
            dy = meq > 0 ? Vector(sol.tail(meq)) : Vector();
            ConeVec gdx = cp.apply_g(dx);
            dz = gdx;
            dz.orth -= dzrhs.orth;
            for (std::size_t k = 0; k < dz.mats.size(); ++k) dz.mats[k] -= dzrhs.mats[k];
            dz = W.apply_hinv(dz);
            ds = gdx;  // ds = -rz - G dx
            ds.orth = -rz.orth - gdx.orth;
            for (std::size_t k = 0; k < ds.mats.size(); ++k) ds.mats[k] = -rz.mats[k] - gdx.mats[k];
        };

        // Predictor.
        ConeVec dc = lam_sq();
        dc.orth = -dc.orth;
        for (auto& M : dc.mats) M = -M;
        Vector dx, dy;
        ConeVec ds = ConeVec::zeros_like(s), dz = ConeVec::zeros_like(z);
        solve_dir(dc, dx, dy, ds, dz);

        ConeVec ds_sc = W.apply_winv(ds), dz_sc = W.apply_wt(dz);
        const double as_aff = std::min(1.0, max_step_scaled(W, ds_sc));
        const double az_aff = std::min(1.0, max_step_scaled(W, dz_sc));
        double gap_aff = 0.0;
        {
            ConeVec strial = s, ztrial = z;
            strial.orth += as_aff * ds.orth;
            ztrial.orth += az_aff * dz.orth;
            for (std::size_t k = 0; k < s.mats.size(); ++k) {
                strial.mats[k] += as_aff * ds.mats[k];
                ztrial.mats[k] += az_aff * dz.mats[k];
            }
            gap_aff = cone_dot(strial, ztrial);
        }
        const double sigma = std::pow(std::clamp(gap_aff / gap, 0.0, 1.0), 3.0);

        // Corrector: dc = sigma*mu*e - lam o lam - (W^-1 ds) o (W^T dz).
        dc = lam_sq();
        dc.orth = Vector::Constant(dc.orth.size(), sigma * mu) - dc.orth -
                  ds_sc.orth.cwiseProduct(dz_sc.orth);
        for (std::size_t k = 0; k < dc.mats.size(); ++k) {
            Matrix cross = 0.5 * (ds_sc.mats[k] * dz_sc.mats[k] + dz_sc.mats[k] * ds_sc.mats[k]);
            dc.mats[k] = sigma * mu * Matrix::Identity(dc.mats[k].rows(), dc.mats[k].cols()) -
                         dc.mats[k] - cross;
        }
        solve_dir(dc, dx, dy, ds, dz);
        ds_sc = W.apply_winv(ds);
        dz_sc = W.apply_wt(dz);
        const double alpha =
            std::min({1.0, 0.99 * max_step_scaled(W, ds_sc), 0.99 * max_step_scaled(W, dz_sc)});

        x += alpha * dx;
        if (meq > 0) y += alpha * dy;
        s.orth += alpha * ds.orth;
        z.orth += alpha * dz.orth;
        for (std::size_t k = 0; k < s.mats.size(); ++k) {
            s.mats[k] += alpha * ds.mats[k];
            z.mats[k] += alpha * dz.mats[k];
        }
        if (alpha < 1e-10) {
            ++iter;
            break;
        }
    }

    if (rep.status != SolveStatus::Optimal && rep.status != SolveStatus::Unbounded &&
        rep.status != SolveStatus::Infeasible)
        rep.status = SolveStatus::MaxIter;
    rep.primal = best_x;
    rep.objective = best_pobj;
    rep.dual_objective = best_dobj;
    rep.kkt = best_kkt;
    rep.iterations = iter;
    if (rep.status == SolveStatus::Optimal) {
        rep.primal = x;
        rep.objective = cur_pobj;
        rep.dual_objective = cur_dobj;
        rep.kkt = cur_kkt;
    }
    return rep;
}

std::string dump_sdp(const SmallSdp& sdp) {
    std::ostringstream out;
    out << "min";
    for (int j = 0; j < sdp.num_vars(); ++j) out << " " << format_double(sdp.objective[j]);
    out << "\n";
    for (const auto& row : sdp.constraints) {
        for (int j = 0; j < row.a.size(); ++j) out << format_double(row.a[j]) << " ";
        out << (row.rel == Rel::LE ? "<=" : row.rel == Rel::GE ? ">=" : "==") << " "
            << format_double(row.rhs) << "\n";
    }
    for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
        out << "block " << b << " dim " << sdp.blocks[b].dim << "\n";
        out << "F0\n" << sdp.blocks[b].f0 << "\n";
        for (const auto& [var, F] : sdp.blocks[b].terms)
            out << "F[x" << var << "]\n" << F << "\n";
    }
    return out.str();
}

}  // namespace morseid
