#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "morseid/convex.hpp"
#include "oracles.hpp"

using namespace morseid;

namespace {

Vector vec(std::initializer_list<double> vals) {
    Vector v(static_cast<int>(vals.size()));
    int i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

LinearProgram random_box_lp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nvars(1, 6), nrows(0, 10), reltype(0, 5);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), slacku(0.1, 2.0);
    const int n = nvars(rng);
    const int m = nrows(rng);
    LinearProgram lp;
    lp.objective.resize(n);
    for (int j = 0; j < n; ++j) lp.objective[j] = coef(rng);
    lp.bounds.resize(n);
    Vector x0(n);
    for (int j = 0; j < n; ++j) {
        const double a = coef(rng), b = coef(rng);
        lp.bounds[j].lo = std::min(a, b) - 0.5;
        lp.bounds[j].hi = std::max(a, b) + 0.5;
        x0[j] = 0.5 * (lp.bounds[j].lo + lp.bounds[j].hi);
    }
    for (int i = 0; i < m; ++i) {
        LinearConstraint row;
        row.a.resize(n);
        for (int j = 0; j < n; ++j) row.a[j] = coef(rng);
        const int r = reltype(rng);
        if (r == 0) {
            row.rel = Rel::EQ;  // passes through the interior point
            row.rhs = row.a.dot(x0);
        } else if (r <= 3) {
            row.rel = Rel::LE;
            row.rhs = row.a.dot(x0) + slacku(rng);
        } else {
            row.rel = Rel::GE;
            row.rhs = row.a.dot(x0) - slacku(rng);
        }
        lp.constraints.push_back(std::move(row));
    }
    return lp;
}

}  // namespace

TEST_CASE("lp: one-variable lower bound via a row") {
    LinearProgram lp;
    lp.objective = vec({1});
    lp.constraints.push_back({vec({1}), Rel::GE, 1.0});
    const SolveReport rep = solve_lp(lp);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(rep.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.primal[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lp: degenerate optimal face still reports the unique objective") {
    LinearProgram lp;
    lp.objective = vec({-1, -1});
    lp.constraints.push_back({vec({1, 1}), Rel::LE, 1.0});
    lp.bounds = {VarBound{0.0, std::numeric_limits<double>::infinity()},
                 VarBound{0.0, std::numeric_limits<double>::infinity()}};
    const SolveReport rep = solve_lp(lp);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(rep.objective == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("lp: statuses for infeasible and unbounded instances") {
    {
        LinearProgram lp;
        lp.objective = vec({1});
        lp.constraints.push_back({vec({1}), Rel::GE, 1.0});
        lp.constraints.push_back({vec({1}), Rel::LE, -1.0});
        CHECK(solve_lp(lp).status == SolveStatus::Infeasible);
    }
    {
        LinearProgram lp;
        lp.objective = vec({-1});
        lp.bounds = {VarBound{0.0, std::numeric_limits<double>::infinity()}};
        CHECK(solve_lp(lp).status == SolveStatus::Unbounded);
    }
}

TEST_CASE("lp: 100 random instances match vertex enumeration") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 100) {
        const LinearProgram lp = random_box_lp(rng);
        const auto oracle = oracles::lp_vertex_enumeration(lp, 1e-9);
        if (!oracle) continue;  // inconsistent equality draw; skip
        const SolveReport rep = solve_lp(lp, 1e-8);
        REQUIRE(rep.status == SolveStatus::Optimal);
        CHECK(rep.objective == doctest::Approx(*oracle).epsilon(1e-6).scale(1.0));
        // Weak duality on every optimal solve.
        CHECK(rep.dual_objective <= rep.objective + 1e-6 * (1.0 + std::abs(rep.objective)));
        CHECK(rep.kkt.primal_feas <= 1e-7);
        CHECK(rep.kkt.dual_feas <= 1e-7);
        ++checked;
    }
}

TEST_CASE("lp: l1 regression recovers exact coefficients (singleton-column path)") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int N = 300, p = 4;
    Matrix G(N, p);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < p; ++j) G(i, j) = gauss(rng);
    Vector c_true(p);
    c_true << 0.5, -1.0, 2.0, 0.0;
    const Vector y = G * c_true;

    // Variables: c (p, bounded), r+ (N), r- (N); rows G c + r+ - r- = y.
    LinearProgram lp;
    const int n = p + 2 * N;
    lp.objective = Vector::Zero(n);
    lp.objective.segment(p, 2 * N).setOnes();
    lp.bounds.assign(n, VarBound{0.0, std::numeric_limits<double>::infinity()});
    for (int j = 0; j < p; ++j) lp.bounds[j] = VarBound{-10.0, 10.0};
    for (int i = 0; i < N; ++i) {
        LinearConstraint row;
        row.a = Vector::Zero(n);
        row.a.head(p) = G.row(i);
        row.a[p + i] = 1.0;
        row.a[p + N + i] = -1.0;
        row.rel = Rel::EQ;
        row.rhs = y[i];
        lp.constraints.push_back(std::move(row));
    }
    const SolveReport rep = solve_lp(lp);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(rep.objective < 1e-5);
    for (int j = 0; j < p; ++j) CHECK(rep.primal[j] == doctest::Approx(c_true[j]).epsilon(1e-4));
}

TEST_CASE("sdp: smallest t with [[t,1],[1,t]] psd is 1") {
    SmallSdp sdp;
    sdp.objective = vec({1});
    SdpBlock blk;
    blk.dim = 2;
    blk.f0 = Matrix::Zero(2, 2);
    blk.f0(0, 1) = blk.f0(1, 0) = 1.0;
    blk.terms.push_back({0, Matrix::Identity(2, 2)});
    sdp.blocks.push_back(blk);
    const SolveReport rep = solve_sdp(sdp);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(rep.primal[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(rep.dual_objective <= rep.objective + 1e-6);
}

TEST_CASE("sdp: with no psd block it agrees with the lp solver") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        const LinearProgram lp = random_box_lp(rng);
        const auto oracle = oracles::lp_vertex_enumeration(lp, 1e-9);
        if (!oracle) continue;
        SmallSdp sdp;
        sdp.objective = lp.objective;
        sdp.constraints = lp.constraints;
        sdp.bounds = lp.bounds;
        const SolveReport a = solve_lp(lp, 1e-8);
        const SolveReport b = solve_sdp(sdp, 1e-8);
        REQUIRE(a.status == SolveStatus::Optimal);
        REQUIRE(b.status == SolveStatus::Optimal);
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("sdp: hand-built two-mode moment problem hardens to the exact mode") {
    // Sample with xdot exactly equal to mode-1 predictions v1; v2 differs.
    const Vector v1 = vec({1.0, -2.0});
    const Vector v2 = vec({0.3, 1.1});
    const Vector xdot = v1;
    // Variables z = (l1, l2, L12, d1, d2).
    SmallSdp sdp;
    sdp.objective = vec({0, 0, 0, 1, 1});
    sdp.bounds.assign(5, VarBound{});
    sdp.bounds[3] = VarBound{0.0, std::numeric_limits<double>::infinity()};
    sdp.bounds[4] = VarBound{0.0, std::numeric_limits<double>::infinity()};
    sdp.constraints.push_back({vec({1, 1, 0, 0, 0}), Rel::EQ, 1.0});
    for (int k = 0; k < 2; ++k) {
        Vector up = Vector::Zero(5), dn = Vector::Zero(5);
        up[0] = -v1[k];
        up[1] = -v2[k];
        up[3 + k] = -1.0;
        dn[0] = v1[k];
        dn[1] = v2[k];
        dn[3 + k] = -1.0;
        sdp.constraints.push_back({up, Rel::LE, -xdot[k]});
        sdp.constraints.push_back({dn, Rel::LE, xdot[k]});
    }
    SdpBlock blk;
    blk.dim = 3;
    blk.f0 = Matrix::Zero(3, 3);
    blk.f0(0, 0) = 1.0;
    Matrix F1 = Matrix::Zero(3, 3), F2 = Matrix::Zero(3, 3), F12 = Matrix::Zero(3, 3);
    F1(0, 1) = F1(1, 0) = 1.0;
    F1(1, 1) = 1.0;
    F2(0, 2) = F2(2, 0) = 1.0;
    F2(2, 2) = 1.0;
    F12(1, 2) = F12(2, 1) = 1.0;
    blk.terms = {{0, F1}, {1, F2}, {2, F12}};
    sdp.blocks.push_back(blk);

    const SolveReport rep = solve_sdp(sdp);
    REQUIRE(rep.status == SolveStatus::Optimal);
    CHECK(rep.primal[0] >= 0.99);  // soft lambda concentrates on mode 1
    CHECK(rep.objective < 1e-5);

    // Independent eigenvalue check of the returned moment block.
    Matrix M = blk.f0;
    for (const auto& [var, F] : blk.terms) M += rep.primal[var] * F;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-6);

    // Brute-force binary assignment picks mode 1 too.
    const double r1 = (xdot - v1).lpNorm<1>();
    const double r2 = (xdot - v2).lpNorm<1>();
    CHECK(r1 < r2);
}

TEST_CASE("sdp: oversized block is rejected") {
    SmallSdp sdp;
    sdp.objective = vec({1});
    SdpBlock blk;
    blk.dim = 17;
    blk.f0 = Matrix::Identity(17, 17);
    blk.terms.push_back({0, Matrix::Identity(17, 17)});
    sdp.blocks.push_back(blk);
    CHECK_THROWS_AS(solve_sdp(sdp), ConfigError);
}

TEST_CASE("dump helpers emit canonical text") {
    LinearProgram lp;
    lp.objective = vec({1, 2});
    lp.constraints.push_back({vec({1, -1}), Rel::LE, 3.0});
    const std::string text = dump_lp(lp);
    CHECK(text.find("min 1 2") != std::string::npos);
    CHECK(text.find("<= 3") != std::string::npos);
}
