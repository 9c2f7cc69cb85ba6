#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "morseid/dynamics.hpp"
#include "oracles.hpp"

using namespace morseid;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

SwitchingModel scalar_decay_model() {
    // 1-D xdot = -x as a single-mode switching model, features (1, x).
    SwitchingModel m;
    m.n = 1;
    m.K = 1;
    m.basis = make_poly_basis(1, 1);
    Matrix C(1, 2);
    C << 0.0, -1.0;
    m.coeffs.push_back(C);
    m.eta = 10.0;
    return m;
}

}  // namespace

TEST_CASE("poly features: affine and univariate cases") {
    const PolyBasis affine = make_poly_basis(2, 1);
    const Vector f = poly_features(affine, vec2(2, 3));
    REQUIRE(f.size() == 3);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == 2.0);
    CHECK(f[2] == 3.0);

    const PolyBasis quad1 = make_poly_basis(1, 2);
    Vector x1(1);
    x1 << 2;
    const Vector g = poly_features(quad1, x1);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    CHECK(g[2] == 4.0);

    CHECK_THROWS_AS(poly_features(affine, x1), ConfigError);
}

TEST_CASE("poly features: degree-3 bivariate matches symbolic enumeration") {
    const PolyBasis basis = make_poly_basis(2, 3);
    REQUIRE(basis.size() == 10);  // C(2+3,3)
    const auto expo = oracles::monomial_exponents(2, 3);
    REQUIRE(expo.size() == 10);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = vec2(unit(rng), unit(rng));
        Vector lib = poly_features(basis, x);
        std::vector<double> ours(lib.data(), lib.data() + lib.size());
        std::vector<double> ref;
        for (const auto& e : expo) ref.push_back(std::pow(x[0], e[0]) * std::pow(x[1], e[1]));
        std::sort(ours.begin(), ours.end());
        std::sort(ref.begin(), ref.end());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(ours[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
    CHECK(poly_features(basis, vec2(0.7, -1.3))[0] == 1.0);
}

TEST_CASE("poly basis is graded lex with the constant first") {
    const PolyBasis basis = make_poly_basis(2, 2);
    REQUIRE(basis.size() == 6);
    CHECK(basis.monomials[0] == std::vector<int>{0, 0});
    CHECK(basis.monomials[1] == std::vector<int>{1, 0});
    CHECK(basis.monomials[2] == std::vector<int>{0, 1});
    CHECK(basis.monomials[3] == std::vector<int>{2, 0});
    CHECK(basis.monomials[4] == std::vector<int>{1, 1});
    CHECK(basis.monomials[5] == std::vector<int>{0, 2});
}

TEST_CASE("toggle switch: equilibria and the H(0)=1 boundary mode") {
    const ToggleSwitch f;
    // Per-mode equilibrium x* = b: in the quadrant x1 >= 3, x2 < 3 the
    // production vector solves to (5,1); symmetric case (1,5).
    CHECK(f.eval(vec2(5, 1)).norm() == 0.0);
    CHECK(f.eval(vec2(1, 5)).norm() == 0.0);

    // On the threshold x2 = 3 the ">=" branch is taken: b1 stays high.
    const Vector at_edge = f.eval(vec2(4, 3));
    CHECK(at_edge[0] == doctest::Approx(1.0));
    CHECK(at_edge[1] == doctest::Approx(-2.0));

    const PiecewiseVanDerPol vdp;
    CHECK(vdp.eval(vec2(0, 0)).norm() == 0.0);
}

TEST_CASE("toggle switch is affine within each quadrant") {
    const ToggleSwitch f;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double qlo[4][2] = {{0, 0}, {3.01, 0}, {0, 3.01}, {3.01, 3.01}};
    const double qhi[4][2] = {{2.99, 2.99}, {6, 2.99}, {2.99, 6}, {6, 6}};
    for (int q = 0; q < 4; ++q) {
        for (int trial = 0; trial < 30; ++trial) {
            Vector a(2), b(2);
            for (int d = 0; d < 2; ++d) {
                a[d] = qlo[q][d] + unit(rng) * (qhi[q][d] - qlo[q][d]);
                b[d] = qlo[q][d] + unit(rng) * (qhi[q][d] - qlo[q][d]);
            }
            const double t = unit(rng);
            const Vector c = a + t * (b - a);
            const Vector lhs = f.eval(c);
            const Vector rhs = f.eval(a) + t * (f.eval(b) - f.eval(a));
            CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
        }
    }
}

TEST_CASE("rk4: scalar decay endpoint and order") {
    const VectorField field = scalar_decay_model();
    Vector x0(1);
    x0 << 1.0;
    const double exact = 0.36787944117144233;  // e^{-1}
    const Vector xe = integrate(field, x0, 1.0, 0.01);
    CHECK(std::abs(xe[0] - exact) < 1e-6);

    const double e1 = std::abs(integrate(field, x0, 1.0, 0.1)[0] - exact);
    const double e2 = std::abs(integrate(field, x0, 1.0, 0.05)[0] - exact);
    const double e3 = std::abs(integrate(field, x0, 1.0, 0.025)[0] - exact);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
    CHECK(e2 / e3 > 12.0);
    CHECK(e2 / e3 < 20.0);
}

TEST_CASE("rk4: equilibrium is a fixed point in one step") {
    const VectorField field = ToggleSwitch{};
    const Vector x0 = vec2(5, 1);
    const Vector x1 = integrate(field, x0, 0.5, 0.5);
    CHECK(x1 == x0);
}

TEST_CASE("rk4: toggle converges to a stable fixed point off the separatrix") {
    // x0 exactly on the diagonal is the saddle's stable manifold, so the
    // bistable limit is only reached from off-diagonal starts.
    const VectorField field = ToggleSwitch{};
    const Vector xf = integrate(field, vec2(0.5, 0.52), 10.0, 0.01);
    const Vector ref = integrate(field, vec2(0.5, 0.52), 10.0, 0.001);
    CHECK((xf - ref).lpNorm<Eigen::Infinity>() < 1e-6);
    const bool near_upper = (xf - vec2(1, 5)).lpNorm<Eigen::Infinity>() < 1e-2;
    const bool near_lower = (xf - vec2(5, 1)).lpNorm<Eigen::Infinity>() < 1e-2;
    CHECK((near_upper || near_lower));
    CHECK(near_upper);  // x2 > x1 start commits to the (1,5) basin
}

TEST_CASE("rk4: divergence raises with the offending point") {
    // xdot = x^2 blows up in finite time from x0 = 1 (blow-up at t = 1).
    SwitchingModel m;
    m.n = 1;
    m.K = 1;
    m.basis = make_poly_basis(1, 2);
    Matrix C(1, 3);
    C << 0.0, 0.0, 1.0;
    m.coeffs.push_back(C);
    Vector x0(1);
    x0 << 1.0;
    CHECK_THROWS_AS(integrate(VectorField{m}, x0, 2.0, 0.001), IntegrationDiverged);
}

TEST_CASE("simulate: sample counts, truncation bound, determinism") {
    const VectorField field = ToggleSwitch{};
    const Box domain = make_box(vec2(0, 0), vec2(6, 6));
    const TrajectoryDataset data = simulate_trajectories(field, 50, 10.0, 0.2, domain, 42);
    CHECK(data.size() <= 50u * 51u);
    CHECK(data.size() > 0u);
    for (const auto& s : data.samples) {
        CHECK(domain.contains(s.x));
        CHECK(s.xdot.size() == 2);
    }

    const TrajectoryDataset again = simulate_trajectories(field, 50, 10.0, 0.2, domain, 42);
    CHECK(dataset_to_csv(data) == dataset_to_csv(again));

    const TrajectoryDataset single = simulate_trajectories(field, 1, 0.0, 0.2, domain, 9);
    REQUIRE(single.size() == 1u);
    CHECK(single.samples[0].t == 0.0);
    CHECK(single.samples[0].xdot == eval_field(field, single.samples[0].x));

    CHECK_THROWS_AS(simulate_trajectories(field, 0, 1.0, 0.2, domain, 1), ConfigError);
}

TEST_CASE("dataset csv round trip is byte identical") {
    const VectorField field = ToggleSwitch{};
    const Box domain = make_box(vec2(0, 0), vec2(6, 6));
    const TrajectoryDataset data = simulate_trajectories(field, 5, 2.0, 0.2, domain, 17);
    const std::string text = dataset_to_csv(data);
    const TrajectoryDataset parsed = dataset_from_csv(text);
    CHECK(dataset_to_csv(parsed) == text);
    CHECK(parsed.dim == 2);
    CHECK(parsed.size() == data.size());
}

TEST_CASE("switching model json round trip is byte identical") {
    SwitchingModel m;
    m.n = 2;
    m.K = 2;
    m.basis = make_poly_basis(2, 3);
    m.coeffs.push_back(Matrix::Random(2, 10));
    m.coeffs.push_back(Matrix::Random(2, 10));
    SwitchingClassifier cl;
    cl.basis = make_poly_basis(2, 2);
    cl.weights = Matrix::Random(2, 6);
    cl.offsets = Vector::Random(2);
    m.classifier = cl;
    m.eta = 10.0;
    m.provenance = "unit-test";
    const std::string text = model_to_json(m);
    const SwitchingModel parsed = model_from_json(text);
    CHECK(model_to_json(parsed) == text);
    CHECK(parsed.K == 2);
    CHECK(parsed.classifier.has_value());
}

TEST_CASE("classifier output is one-hot on random states") {
    SwitchingClassifier cl;
    cl.basis = make_poly_basis(2, 2);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    cl.weights.resize(3, cl.basis.size());
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < cl.basis.size(); ++c) cl.weights(r, c) = gauss(rng);
    cl.offsets = Vector::Zero(3);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const Vector x = vec2(unit(rng), unit(rng));
        const Vector hot = cl.one_hot(x);
        CHECK(hot.sum() == 1.0);
        CHECK(hot.maxCoeff() == 1.0);
        CHECK(hot.minCoeff() == 0.0);
    }
    // Lowest index wins ties.
    SwitchingClassifier tie;
    tie.basis = make_poly_basis(2, 0);
    tie.weights = Matrix::Zero(2, 1);
    tie.offsets = Vector::Zero(2);
    CHECK(tie.predict(vec2(1, 1)) == 0);
}
