#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morseid/common.hpp"
#include "morseid/grid.hpp"

namespace morseid {

/// All monomials of total degree <= degree in graded-lex order, constant first.
struct PolyBasis {
    int dimension = 0;
    int degree = 0;
    std::vector<std::vector<int>> monomials;

    int size() const { return static_cast<int>(monomials.size()); }
};

PolyBasis make_poly_basis(int dimension, int degree);

/// Monomial evaluations in basis order; entry 0 is the constant 1.
Vector poly_features(const PolyBasis& basis, const Vector& x);

/// One-vs-rest polynomial classifier; prediction is argmax of class scores,
/// lowest index on ties.
struct SwitchingClassifier {
    PolyBasis basis;
    Matrix weights;  // K x |basis|
    Vector offsets;  // K
    double train_accuracy = -1.0;  // diagnostic only, not serialized

    Vector scores(const Vector& x) const;
    int predict(const Vector& x) const;
    Vector one_hot(const Vector& x) const;
};

/// Identified switching system: K coefficient matrices over a shared basis
/// plus the learned switching law.
struct SwitchingModel {
    int n = 0;
    int K = 0;
    PolyBasis basis;
    std::vector<Matrix> coeffs;  // K matrices, each n x |basis|
    std::optional<SwitchingClassifier> classifier;
    double eta = 0.0;
    std::string provenance;

    int mode_of(const Vector& x) const;
    Vector eval(const Vector& x) const;
};

/// Two-gene toggle switch; production switches at thresholds T with H(0)=1.
struct ToggleSwitch {
    Vector gamma{Vector::Constant(2, 1.0)};
    Vector threshold{Vector::Constant(2, 3.0)};
    Vector low{Vector::Constant(2, 1.0)};
    Vector high{Vector::Constant(2, 5.0)};

    Vector eval(const Vector& x) const;
};

/// Van der Pol variant whose restoring force switches from cubic to linear
/// at |x1| = 1.
struct PiecewiseVanDerPol {
    Vector eval(const Vector& x) const;
};

using VectorField = std::variant<ToggleSwitch, PiecewiseVanDerPol, SwitchingModel>;

Vector eval_field(const VectorField& field, const Vector& x);
int field_dim(const VectorField& field);

/// Classical fixed-step RK4 over ceil(tau/h) steps, last step shortened.
/// Throws IntegrationDiverged when the state leaves the finite range.
Vector integrate(const VectorField& field, const Vector& x0, double tau, double h);

struct TrajectorySample {
    int traj_id = 0;
    double t = 0.0;
    Vector x;
    Vector xdot;
};

struct TrajectoryDataset {
    int dim = 0;
    std::vector<TrajectorySample> samples;

    std::size_t size() const { return samples.size(); }
};

/// N seeded uniform initial conditions, sampled every sample_dt; trajectories
/// are truncated once a sample leaves the domain.
TrajectoryDataset simulate_trajectories(const VectorField& field, int count, double horizon,
                                        double sample_dt, const Box& domain, std::uint64_t seed,
                                        double h = 0.01);

// File formats: CSV `traj_id,t,x1..xn,dx1..dxn` for datasets, JSON for models.
std::string dataset_to_csv(const TrajectoryDataset& data);
TrajectoryDataset dataset_from_csv(const std::string& text);
void write_dataset_csv(const std::string& path, const TrajectoryDataset& data);
TrajectoryDataset read_dataset_csv(const std::string& path);

std::string model_to_json(const SwitchingModel& model);
SwitchingModel model_from_json(const std::string& text);
void write_model_json(const std::string& path, const SwitchingModel& model);
SwitchingModel read_model_json(const std::string& path);

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace morseid
