#include "morseid/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace morseid {

namespace {

Matrix feature_matrix(const TrajectoryDataset& data, const PolyBasis& basis) {
    Matrix F(static_cast<int>(data.size()), basis.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        F.row(static_cast<int>(i)) = poly_features(basis, data.samples[i].x).transpose();
    return F;
}

}  // namespace

WarmStart warm_start(const TrajectoryDataset& data, int K, int degree, std::uint64_t seed) {
    const int N = static_cast<int>(data.size());
    if (N == 0) throw ConfigError("warm_start: dataset is empty");
    if (K < 1) throw ConfigError("warm_start: K must be >= 1");
    if (K > N) throw ConfigError("warm_start: more modes than samples");
    const int n = data.dim;

    Matrix V(N, n);
    for (int i = 0; i < N; ++i) V.row(i) = data.samples[i].xdot.transpose();

    std::mt19937_64 rng(mix_seed(seed, 0x6b6d65616e73ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding on the velocity rows.
    Matrix centers(K, n);
    std::vector<double> d2(N, std::numeric_limits<double>::infinity());
    centers.row(0) = V.row(static_cast<int>(unit(rng) * N) % N);
    for (int c = 1; c < K; ++c) {
        double total = 0.0;
        for (int i = 0; i < N; ++i) {
            const double d = (V.row(i) - centers.row(c - 1)).squaredNorm();
            d2[i] = std::min(d2[i], d);
            total += d2[i];
        }
        double target = unit(rng) * total, acc = 0.0;
        int pick = N - 1;
        for (int i = 0; i < N; ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers.row(c) = V.row(pick);
    }

    std::vector<int> labels(N, 0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool changed = false;
        for (int i = 0; i < N; ++i) {
            int best = 0;
            double bestd = (V.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < K; ++c) {
                const double d = (V.row(i) - centers.row(c)).squaredNorm();
                if (d < bestd) {
                    bestd = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        std::vector<int> count(K, 0);
        Matrix sums = Matrix::Zero(K, n);
        for (int i = 0; i < N; ++i) {
            ++count[labels[i]];
            sums.row(labels[i]) += V.row(i);
        }
        for (int c = 0; c < K; ++c) {
            if (count[c] > 0) {
                centers.row(c) = sums.row(c) / count[c];
                continue;
            }
            // Empty cluster: reseed from the sample farthest from its center.
            int far = 0;
            double fard = -1.0;
            for (int i = 0; i < N; ++i) {
                const double d = (V.row(i) - centers.row(labels[i])).squaredNorm();
                if (d > fard) {
                    fard = d;
                    far = i;
                }
            }
            centers.row(c) = V.row(far);
            labels[far] = c;
            changed = true;
        }
        if (!changed) break;
    }

    // Cluster-wise least squares onto the feature basis.
    const PolyBasis basis = make_poly_basis(n, degree);
    const Matrix F = feature_matrix(data, basis);
    WarmStart out;
    out.labels = labels;
    for (int c = 0; c < K; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < N; ++i)
            if (labels[i] == c) idx.push_back(i);
        Matrix C = Matrix::Zero(n, basis.size());
        if (!idx.empty()) {
            Matrix Fc(static_cast<int>(idx.size()), basis.size());
            Matrix Yc(static_cast<int>(idx.size()), n);
            for (std::size_t r = 0; r < idx.size(); ++r) {
                Fc.row(static_cast<int>(r)) = F.row(idx[r]);
                Yc.row(static_cast<int>(r)) = V.row(idx[r]);
            }
            Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Fc);
            C = cod.solve(Yc).transpose();
        }
        out.coeffs.push_back(std::move(C));
    }
    return out;
}

Vector harden(const Vector& soft_row) {
    Vector v = Vector::Zero(soft_row.size());
    v[harden_index(soft_row)] = 1.0;
    return v;
}

int harden_index(const Vector& soft_row) {
    int best = 0;
    for (int j = 1; j < soft_row.size(); ++j)
        if (soft_row[j] > soft_row[best]) best = j;
    return best;
}

namespace {

// Order-1 moment SDP for one sample; variables (lambda, Lambda_offdiag, delta).
SmallSdp build_sample_sdp(const Vector& xdot, const Matrix& mode_predictions /* n x K */) {
    const int K = static_cast<int>(mode_predictions.cols());
    const int n = static_cast<int>(xdot.size());
    const int off = K * (K - 1) / 2;
    const int q = K + off + n;
    SmallSdp sdp;
    sdp.objective = Vector::Zero(q);
    sdp.objective.tail(n).setOnes();
    sdp.bounds.assign(q, VarBound{});
    for (int k = 0; k < n; ++k)
        sdp.bounds[K + off + k] = VarBound{0.0, std::numeric_limits<double>::infinity()};

    LinearConstraint simplex;
    simplex.a = Vector::Zero(q);
    simplex.a.head(K).setOnes();
    simplex.rel = Rel::EQ;
    simplex.rhs = 1.0;
    sdp.constraints.push_back(std::move(simplex));

    for (int k = 0; k < n; ++k) {
        LinearConstraint up, dn;
        up.a = Vector::Zero(q);
        dn.a = Vector::Zero(q);
        for (int j = 0; j < K; ++j) {
            up.a[j] = mode_predictions(k, j);
            dn.a[j] = -mode_predictions(k, j);
        }
        up.a[K + off + k] = -1.0;
        dn.a[K + off + k] = -1.0;
        up.rel = dn.rel = Rel::LE;
        up.rhs = xdot[k];
        dn.rhs = -xdot[k];
        sdp.constraints.push_back(std::move(up));
        sdp.constraints.push_back(std::move(dn));
    }

    // Moment matrix [[1, l^T], [l, L]] with diag(L) = l substituted in place.
    SdpBlock blk;
    blk.dim = K + 1;
    blk.f0 = Matrix::Zero(K + 1, K + 1);
    blk.f0(0, 0) = 1.0;
    for (int j = 0; j < K; ++j) {
        Matrix F = Matrix::Zero(K + 1, K + 1);
        F(0, j + 1) = F(j + 1, 0) = 1.0;
        F(j + 1, j + 1) = 1.0;
        blk.terms.push_back({j, F});
    }
    int v = K;
    for (int j = 0; j < K; ++j)
        for (int l = j + 1; l < K; ++l) {
            Matrix F = Matrix::Zero(K + 1, K + 1);
            F(j + 1, l + 1) = F(l + 1, j + 1) = 1.0;
            blk.terms.push_back({v++, F});
        }
    sdp.blocks.push_back(std::move(blk));
    return sdp;
}

}  // namespace

ModeAssignment mode_sdp(const TrajectoryDataset& data, const std::vector<Matrix>& coeffs,
                        const PolyBasis& basis, double solver_tol, int solver_max_iter) {
    const int N = static_cast<int>(data.size());
    const int K = static_cast<int>(coeffs.size());
    if (K < 1) throw ConfigError("mode_sdp: no coefficient matrices");

    ModeAssignment out;
    out.soft = Matrix::Zero(N, K);
    out.hard.assign(N, 0);
    out.sample_status.assign(N, SolveStatus::Optimal);
    if (K == 1) {
        out.soft.setOnes();
        return out;
    }

    for (int i = 0; i < N; ++i) {
        const Vector phi = poly_features(basis, data.samples[i].x);
        Matrix preds(data.dim, K);
        for (int j = 0; j < K; ++j) preds.col(j) = coeffs[j] * phi;

        const SmallSdp sdp = build_sample_sdp(data.samples[i].xdot, preds);
        const SolveReport rep = solve_sdp(sdp, solver_tol, solver_max_iter);
        out.sample_status[i] = rep.status;
        if (rep.status == SolveStatus::Optimal) {
            Vector lam = rep.primal.head(K).cwiseMax(0.0);
            const double sum = lam.sum();
            if (sum > 0.0) lam /= sum;
            out.soft.row(i) = lam.transpose();
            out.hard[i] = harden_index(lam);
        } else {
            // Nearest-residual fallback keeps the pipeline moving.
            ++out.non_optimal_samples;
            int best = 0;
            double bestr = (data.samples[i].xdot - preds.col(0)).lpNorm<1>();
            for (int j = 1; j < K; ++j) {
                const double r = (data.samples[i].xdot - preds.col(j)).lpNorm<1>();
                if (r < bestr) {
                    bestr = r;
                    best = j;
                }
            }
            out.hard[i] = best;
            out.soft.row(i).setZero();
            out.soft(i, best) = 1.0;
        }
    }
    return out;
}

std::vector<Matrix> dynamics_lp(const TrajectoryDataset& data, const std::vector<int>& labels,
                                int K, const PolyBasis& basis, double eta,
                                const std::vector<Matrix>& previous,
                                std::vector<bool>* empty_modes, double solver_tol,
                                int solver_max_iter) {
    const int N = static_cast<int>(data.size());
    const int n = data.dim;
    const int p = basis.size();
    if (static_cast<int>(labels.size()) != N)
        throw ConfigError("dynamics_lp: label count does not match dataset");

    const Matrix F = feature_matrix(data, basis);
    std::vector<Matrix> coeffs(K, Matrix::Zero(n, p));
    if (empty_modes) empty_modes->assign(K, false);

    for (int j = 0; j < K; ++j) {
        std::vector<int> idx;
        for (int i = 0; i < N; ++i)
            if (labels[i] == j) idx.push_back(i);
        if (idx.empty()) {
            coeffs[j] = j < static_cast<int>(previous.size()) ? previous[j] : Matrix::Zero(n, p);
            if (empty_modes) (*empty_modes)[j] = true;
            continue;
        }
        const int Nj = static_cast<int>(idx.size());
        // One l1 regression per output dimension; they share no variables.
        for (int k = 0; k < n; ++k) {
            LinearProgram lp;
            const int nv = p + 2 * Nj;
            lp.objective = Vector::Zero(nv);
            lp.objective.segment(p, 2 * Nj).setOnes();
            lp.bounds.assign(nv, VarBound{0.0, std::numeric_limits<double>::infinity()});
            for (int c = 0; c < p; ++c) lp.bounds[c] = VarBound{-eta, eta};
            for (int r = 0; r < Nj; ++r) {
                LinearConstraint row;
                row.a = Vector::Zero(nv);
                row.a.head(p) = F.row(idx[r]);
                row.a[p + r] = 1.0;
                row.a[p + Nj + r] = -1.0;
                row.rel = Rel::EQ;
                row.rhs = data.samples[idx[r]].xdot[k];
                lp.constraints.push_back(std::move(row));
            }
            const SolveReport rep = solve_lp(lp, solver_tol, solver_max_iter);
            if (rep.status != SolveStatus::Optimal) {
                std::ostringstream msg;
                msg << "dynamics LP failed for mode " << j << " output " << k << " ("
                    << to_string(rep.status) << ")";
                throw NumericalError(msg.str());
            }
            coeffs[j].row(k) = rep.primal.head(p).cwiseMax(-eta).cwiseMin(eta).transpose();
        }
    }
    return coeffs;
}

double assignment_objective(const TrajectoryDataset& data, const std::vector<Matrix>& coeffs,
                            const PolyBasis& basis, const std::vector<int>& labels) {
    double obj = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vector phi = poly_features(basis, data.samples[i].x);
        obj += (data.samples[i].xdot - coeffs[labels[i]] * phi).lpNorm<1>();
    }
    return obj;
}

IdentResult alternate(const TrajectoryDataset& data, const IdentConfig& config) {
    return alternate_from(data, config, warm_start(data, config.K, config.degree, config.seed));
}

IdentResult alternate_from(const TrajectoryDataset& data, const IdentConfig& config,
                           WarmStart start) {
    if (config.K < 1) throw ConfigError("alternate: K must be >= 1");
    if (config.eta <= 0.0) throw ConfigError("alternate: eta must be positive");
    const PolyBasis basis = make_poly_basis(data.dim, config.degree);

    std::vector<int> labels = std::move(start.labels);
    std::vector<Matrix> coeffs = std::move(start.coeffs);
    IdentResult result;
    result.converged = false;

    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_coeffs;
    std::vector<int> best_labels;
    ModeAssignment last_assignment;

    for (int outer = 0; outer < config.max_outer_iters; ++outer) {
        coeffs = dynamics_lp(data, labels, config.K, basis, config.eta, coeffs, nullptr,
                             config.solver_tol, config.solver_max_iter);
        const double obj = assignment_objective(data, coeffs, basis, labels);
        result.objective_history.push_back(obj);
        if (obj < best_obj) {
            best_obj = obj;
            best_coeffs = coeffs;
            best_labels = labels;
        }
        if (result.objective_history.size() >= 2) {
            const double prev = result.objective_history[result.objective_history.size() - 2];
            if (prev - obj < config.objective_tol * std::max(1.0, prev)) {
                result.converged = true;
                break;
            }
        }

        ModeAssignment assignment =
            mode_sdp(data, coeffs, basis, config.solver_tol, config.solver_max_iter);
        // Adopt a relabel only when it does not worsen that sample's residual;
        // keeps the recorded objective non-increasing through hardening.
        bool changed = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const int cand = assignment.hard[i];
            if (cand == labels[i]) continue;
            const Vector phi = poly_features(basis, data.samples[i].x);
            const double r_new = (data.samples[i].xdot - coeffs[cand] * phi).lpNorm<1>();
            const double r_old = (data.samples[i].xdot - coeffs[labels[i]] * phi).lpNorm<1>();
            if (r_new <= r_old + 1e-12) {
                labels[i] = cand;
                changed = true;
            } else {
                assignment.hard[i] = labels[i];
            }
        }
        last_assignment = std::move(assignment);
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    if (last_assignment.hard.empty()) {
        // Converged before any SDP round (e.g. K=1): report the labels as-is.
        last_assignment.soft = Matrix::Zero(static_cast<int>(data.size()), config.K);
        last_assignment.hard = best_labels;
        for (std::size_t i = 0; i < best_labels.size(); ++i)
            last_assignment.soft(static_cast<int>(i), best_labels[i]) = 1.0;
        last_assignment.sample_status.assign(data.size(), SolveStatus::Optimal);
    }

    result.model.n = data.dim;
    result.model.K = config.K;
    result.model.basis = basis;
    result.model.coeffs = best_coeffs;
    result.model.eta = config.eta;
    result.assignment = std::move(last_assignment);
    result.assignment.hard = best_labels;
    return result;
}

SwitchingClassifier fit_classifier(const std::vector<Vector>& points,
                                   const std::vector<int>& labels, int K, int degree,
                                   double reg_c, double solver_tol, int solver_max_iter) {
    if (points.empty()) throw ConfigError("fit_classifier: no points");
    if (points.size() != labels.size())
        throw ConfigError("fit_classifier: points/labels size mismatch");
    const int n = static_cast<int>(points[0].size());
    const int N = static_cast<int>(points.size());
    SwitchingClassifier cl;
    cl.basis = make_poly_basis(n, degree);
    const int p = cl.basis.size();
    cl.weights = Matrix::Zero(K, p);
    cl.offsets = Vector::Zero(K);

    std::vector<int> present;
    {
        std::vector<bool> seen(K, false);
        for (int l : labels) {
            if (l < 0 || l >= K) throw ConfigError("fit_classifier: label out of range");
            seen[l] = true;
        }
        for (int j = 0; j < K; ++j)
            if (seen[j]) present.push_back(j);
    }
    if (present.size() < 2) {
        // Constant classifier: every state maps to the single observed mode.
        cl.offsets[present.empty() ? 0 : present.front()] = 1.0;
        cl.train_accuracy = 1.0;
        return cl;
    }

    Matrix F(N, p);
    for (int i = 0; i < N; ++i) F.row(i) = poly_features(cl.basis, points[i]).transpose();

    for (int j : present) {
        // Variables: w+ (p), w- (p), b+, b-, slack (N).
        LinearProgram lp;
        const int nv = 2 * p + 2 + N;
        lp.objective = Vector::Zero(nv);
        lp.objective.head(2 * p).setConstant(1.0 / reg_c);
        lp.objective.tail(N).setOnes();
        lp.bounds.assign(nv, VarBound{0.0, std::numeric_limits<double>::infinity()});
        for (int i = 0; i < N; ++i) {
            const double y = labels[i] == j ? 1.0 : -1.0;
            LinearConstraint row;
            row.a = Vector::Zero(nv);
            row.a.head(p) = y * F.row(i);
            row.a.segment(p, p) = -y * F.row(i);
            row.a[2 * p] = y;
            row.a[2 * p + 1] = -y;
            row.a[2 * p + 2 + i] = 1.0;
            row.rel = Rel::GE;
            row.rhs = 1.0;
            lp.constraints.push_back(std::move(row));
        }
        const SolveReport rep = solve_lp(lp, solver_tol, solver_max_iter);
        if (rep.status != SolveStatus::Optimal) {
            std::ostringstream msg;
            msg << "classifier LP failed for class " << j << " (" << to_string(rep.status)
                << "); feature matrix may be degenerate";
            throw NumericalError(msg.str());
        }
        cl.weights.row(j) = (rep.primal.head(p) - rep.primal.segment(p, p)).transpose();
        cl.offsets[j] = rep.primal[2 * p] - rep.primal[2 * p + 1];
    }

    int correct = 0;
    for (int i = 0; i < N; ++i)
        if (cl.predict(points[i]) == labels[i]) ++correct;
    cl.train_accuracy = static_cast<double>(correct) / N;
    return cl;
}

}  // namespace morseid
