#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace morseid {

inline constexpr const char* kToolVersion = "morseid 0.1.0";

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexVector = Eigen::VectorXi;

/// Bad configuration or malformed input (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: diverged integration, solver breakdown (exit code 3).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (exit code 4).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Integration blew up; carries the offending initial point.
struct IntegrationDiverged : NumericalError {
    Vector point;
    IntegrationDiverged(const std::string& what, Vector p)
        : NumericalError(what), point(std::move(p)) {}
};

/// Shortest round-trip decimal form of a double (std::to_chars based).
std::string format_double(double v);

/// Deterministic 64-bit stream mixer for (seed, stream) derived RNGs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace morseid
