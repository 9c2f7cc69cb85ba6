#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "morseid/dynamics.hpp"
#include "morseid/grid.hpp"

namespace morseid {

/// Combinatorial multivalued map: per-cell sorted image lists over the grid's
/// row-major linearization plus per-cell escape flags.
struct CellMap {
    CubicalGrid grid;
    std::vector<std::vector<std::int32_t>> images;
    std::vector<bool> escapes;
    std::string method;

    std::int64_t cell_count() const { return grid.cell_count(); }
    std::int64_t edge_count() const;
};

/// Vertex bounding-box outer approximation: integrate the 2^n corners (plus
/// the center when requested) for time tau, box the images, inflate per axis.
CellMap bounding_box_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                         double inflation_eps = 0.0, bool include_center = true);

/// Proposition-style coarsening: the bounding box inflated by delta per axis.
/// Requires 0 <= delta < grid_diameter / 2.
CellMap inflate_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                    double delta);

struct LipschitzEstimate {
    double L = 0.0;
    int excluded = 0;
    bool warning = false;  // more than 1% of pairs excluded
};

/// Sampled flow-map expansion: max ||phi(x) - phi(x + r u)|| / r over seeded
/// nearby pairs, times a 1.1 safety factor.
LipschitzEstimate estimate_lipschitz(const VectorField& field, const Box& domain, double tau,
                                     double h, int sample_pairs, std::uint64_t seed);

/// Ball outer approximation: cells meeting B(phi_tau(v), L d / 2) for some
/// vertex v, with d the grid diameter.
CellMap lipschitz_map(const CubicalGrid& grid, const VectorField& field, double tau, double h,
                      double L_tau);

/// (x_t, x_{t+tau}) pairs along each trajectory of the dataset.
std::vector<std::pair<Vector, Vector>> make_flow_pairs(const TrajectoryDataset& data, double tau,
                                                       double t_tol = 1e-6);

struct GpHyper {
    double length_scale = 1.0;
    double signal_var = 1.0;
    double noise_var = 1e-6;
    double jitter = 0.0;
    double nlml = 0.0;
};

/// Independent exact RBF regressions of each flow-map output dimension, with
/// hyperparameters picked by marginal likelihood over a fixed log lattice.
struct GpModel {
    Matrix train_x;  // m x n
    Matrix train_y;  // m x n (flow images)
    Vector y_mean;   // per output dimension
    std::vector<GpHyper> hyper;       // per output dimension
    std::vector<Matrix> chol_lower;   // per output dimension
    std::vector<Vector> alpha;        // per output dimension

    int input_dim() const { return static_cast<int>(train_x.cols()); }
    int train_size() const { return static_cast<int>(train_x.rows()); }
};

struct GpFitOptions {
    int max_train = 1200;        // deterministic stride subsample above this
    int hyper_subset = 400;      // marginal-likelihood search subset size
    double max_jitter = 1e-4;
};

GpModel fit_gp(const std::vector<std::pair<Vector, Vector>>& pairs,
               const GpFitOptions& options = {});

/// Batched predictive mean and per-dimension latent standard deviation.
void gp_predict(const GpModel& gp, const Matrix& queries, Matrix& mean, Matrix& stddev);

/// Two-sided normal quantile for the given confidence (0.95 -> 1.959964).
double normal_quantile_two_sided(double confidence);

/// Confidence-box union map: per cell, the box from GP prediction at the cell
/// center joined with the bounding box of the GP-mean vertex images.
CellMap gp_map(const CubicalGrid& grid, const GpModel& gp, double confidence = 0.95);

}  // namespace morseid
