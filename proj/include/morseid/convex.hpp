#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "morseid/common.hpp"

namespace morseid {

enum class Rel { LE, EQ, GE };

struct LinearConstraint {
    Vector a;
    Rel rel = Rel::LE;
    double rhs = 0.0;
};

struct VarBound {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Dense LP: min objective . x subject to rows and optional variable bounds.
struct LinearProgram {
    Vector objective;
    std::vector<LinearConstraint> constraints;
    std::vector<VarBound> bounds;  // empty means all variables free

    int num_vars() const { return static_cast<int>(objective.size()); }
};

/// One PSD constraint f0 + sum_i z_i * terms[i] >= 0 on small dense blocks.
struct SdpBlock {
    int dim = 0;
    Matrix f0;
    std::vector<std::pair<int, Matrix>> terms;  // (variable index, symmetric matrix)
};

/// Small-block SDP over scalar variables: LP data plus PSD blocks (<= 16x16).
struct SmallSdp {
    Vector objective;
    std::vector<LinearConstraint> constraints;
    std::vector<VarBound> bounds;
    std::vector<SdpBlock> blocks;

    int num_vars() const { return static_cast<int>(objective.size()); }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct KktResiduals {
    double primal_feas = 0.0;
    double dual_feas = 0.0;
    double duality_gap = 0.0;  // relative: |pobj - dobj| / (1 + |pobj|)
};

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIter;
    Vector primal;
    double objective = 0.0;
    double dual_objective = 0.0;
    KktResiduals kkt;
    int iterations = 0;
};

/// Primal-dual interior-point solve; deterministic, never throws on
/// infeasible/unbounded input (reported via status).
SolveReport solve_lp(const LinearProgram& lp, double tol = 1e-7, int max_iter = 100);

/// Nesterov-Todd scaled interior-point solve for small-block SDPs.
SolveReport solve_sdp(const SmallSdp& sdp, double tol = 1e-7, int max_iter = 100);

const char* to_string(SolveStatus status);

/// Plain-text canonical form for offline inspection.
std::string dump_lp(const LinearProgram& lp);
std::string dump_sdp(const SmallSdp& sdp);

}  // namespace morseid
