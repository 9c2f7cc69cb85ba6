#pragma once

#include <cstdint>
#include <vector>

#include "morseid/convex.hpp"
#include "morseid/dynamics.hpp"

namespace morseid {

/// Per-sample soft moments plus hardened labels (argmax, lowest-index ties).
struct ModeAssignment {
    Matrix soft;             // N x K, rows on the simplex
    std::vector<int> hard;   // N labels in [0, K)
    std::vector<SolveStatus> sample_status;
    int non_optimal_samples = 0;
};

struct IdentConfig {
    int K = 1;
    int degree = 1;
    double eta = 10.0;
    int max_outer_iters = 30;
    double objective_tol = 1e-6;  // relative decrease per outer iteration
    double solver_tol = 1e-7;
    int solver_max_iter = 100;
    std::uint64_t seed = 0;
};

struct IdentResult {
    SwitchingModel model;
    ModeAssignment assignment;
    std::vector<double> objective_history;  // l1 residual sum after each refit
    bool converged = false;
};

struct WarmStart {
    std::vector<int> labels;
    std::vector<Matrix> coeffs;
};

/// K-means on the velocity samples (k-means++ seeding, <= 100 sweeps, empty
/// clusters reseeded from the farthest point), then cluster-wise least squares.
WarmStart warm_start(const TrajectoryDataset& data, int K, int degree, std::uint64_t seed);

/// Order-1 moment relaxation per sample with the coefficients fixed. Falls
/// back to the nearest-residual label on a non-optimal solve.
ModeAssignment mode_sdp(const TrajectoryDataset& data, const std::vector<Matrix>& coeffs,
                        const PolyBasis& basis, double solver_tol = 1e-7,
                        int solver_max_iter = 100);

/// Projects a simplex row to its argmax vertex, lowest index on ties.
Vector harden(const Vector& soft_row);
int harden_index(const Vector& soft_row);

/// Per-mode l1 coefficient regression with entry bounds [-eta, eta]; modes
/// without samples keep their previous coefficients and are flagged.
std::vector<Matrix> dynamics_lp(const TrajectoryDataset& data, const std::vector<int>& labels,
                                int K, const PolyBasis& basis, double eta,
                                const std::vector<Matrix>& previous,
                                std::vector<bool>* empty_modes = nullptr,
                                double solver_tol = 1e-7, int solver_max_iter = 100);

/// Shared mixed-integer objective at fixed labels: sum_i |xdot_i - C_l Phi|_1.
double assignment_objective(const TrajectoryDataset& data, const std::vector<Matrix>& coeffs,
                            const PolyBasis& basis, const std::vector<int>& labels);

/// Alternation loop: warm start, then dynamics LP / mode SDP rounds until the
/// objective decrease falls under objective_tol or labels reach a fixed point.
IdentResult alternate(const TrajectoryDataset& data, const IdentConfig& config);
IdentResult alternate_from(const TrajectoryDataset& data, const IdentConfig& config,
                           WarmStart start);

/// One-vs-rest soft-margin polynomial classifier: hinge loss plus an l1
/// weight penalty scaled by 1/reg_c, one LP per class.
SwitchingClassifier fit_classifier(const std::vector<Vector>& points,
                                   const std::vector<int>& labels, int K, int degree,
                                   double reg_c = 10.0, double solver_tol = 1e-7,
                                   int solver_max_iter = 100);

}  // namespace morseid
