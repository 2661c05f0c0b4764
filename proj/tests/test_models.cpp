#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "core/errors.hpp"
#include "core/model.hpp"

using namespace stochsync;

namespace {

double eval1(const NodeModel& m, double t, double x, bool drift) {
    double out = 0.0;
    std::span<const double> in(&x, 1);
    std::span<double> o(&out, 1);
    if (drift)
        m.drift(t, in, o);
    else
        m.diffusion(t, in, o);
    return out;
}

Matrix scalar_matrix(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

} // namespace

TEST_CASE("bistable drift evaluation") {
    NodeModel m = NodeModel::bistable(5.0, 4.0);
    CHECK(m.dim() == 1);
    CHECK(m.kind() == ModelKind::bistable);
    CHECK(m.noise_mode() == NoiseMode::common);
    CHECK(eval1(m, 0.0, 1.0, true) == doctest::Approx(4.0));
    CHECK(eval1(m, 0.0, 0.0, true) == 0.0);
    // +/- sqrt(r) are fixed points of r*x - x^3.
    CHECK(std::abs(eval1(m, 0.0, std::sqrt(5.0), true)) <= 1e-12);
    CHECK(std::abs(eval1(m, 0.0, -std::sqrt(5.0), true)) <= 1e-12);
    CHECK(m.scalar_param("r") == 5.0);
    CHECK(m.scalar_param("sigma_n") == 4.0);
}

TEST_CASE("bistable diffusion evaluation") {
    NodeModel m = NodeModel::bistable(5.0, 4.0);
    CHECK(eval1(m, 0.0, 2.0, false) == doctest::Approx(8.0));
    CHECK(eval1(m, 0.0, 0.0, false) == 0.0);
    CHECK(eval1(m, 0.0, -1.0, false) == doctest::Approx(-4.0));
}

TEST_CASE("non-finite input is rejected") {
    NodeModel m = NodeModel::bistable(5.0, 4.0);
    double inf = std::numeric_limits<double>::infinity();
    double nan = std::numeric_limits<double>::quiet_NaN();
    double out;
    CHECK_THROWS_AS(m.drift(0.0, std::span<const double>(&inf, 1), {&out, 1}),
                    ValidationError);
    CHECK_THROWS_AS(m.diffusion(0.0, std::span<const double>(&nan, 1), {&out, 1}),
                    ValidationError);
}

TEST_CASE("factory validation") {
    CHECK_THROWS_AS(NodeModel::bistable(5.0, -1.0), ValidationError);
    CHECK_THROWS_AS(NodeModel::ddm(1.0, -0.5), ValidationError);
    CHECK_THROWS_AS(NodeModel::linear(Matrix(2, 3), Matrix(2, 2)), ValidationError);
    CHECK_THROWS_AS(NodeModel::linear(Matrix(2, 2), Matrix(3, 3)), ValidationError);
}

TEST_CASE("diffusion is linear in the state") {
    NodeModel bist = NodeModel::bistable(3.0, 2.5);
    Matrix a(2, 2), g(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    g(0, 0) = 0.5;
    g(1, 1) = 1.5;
    g(0, 1) = 0.25;
    g(1, 0) = 0.25;
    NodeModel lin = NodeModel::linear(a, g);

    std::mt19937_64 eng(77);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        double alpha = u(eng);
        double x = u(eng);
        CHECK(eval1(bist, 0.0, alpha * x, false) ==
              doctest::Approx(alpha * eval1(bist, 0.0, x, false)).epsilon(1e-12));

        std::vector<double> v = {u(eng), u(eng)}, scaled = {alpha * v[0], alpha * v[1]};
        std::vector<double> gv(2), gs(2);
        lin.diffusion(0.0, v, gv);
        lin.diffusion(0.0, scaled, gs);
        for (int i = 0; i < 2; ++i)
            CHECK(gs[i] == doctest::Approx(alpha * gv[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("bistable drift satisfies the one-sided bound with k_f = r") {
    const double r = 5.0;
    NodeModel m = NodeModel::bistable(r, 1.0);
    std::mt19937_64 eng(123);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 100000; ++i) {
        double x = u(eng), y = u(eng);
        double d = x - y;
        double lhs = d * (eval1(m, 0.0, x, true) - eval1(m, 0.0, y, true));
        CHECK(lhs <= r * d * d + 1e-9 * std::abs(r * d * d));
    }
}

TEST_CASE("analytic constants for built-ins") {
    ModelConstants bist = analytic_constants(NodeModel::bistable(5.0, 4.0));
    CHECK(bist.k_f == 5.0);
    CHECK(bist.k_g == 4.0);
    CHECK(bist.k_g_bar == 4.0);
    CHECK(bist.provenance == ConstantsProvenance::analytic);

    ModelConstants cons = analytic_constants(NodeModel::integrator());
    CHECK(cons.k_f == 0.0);
    CHECK(cons.k_g == 0.0);
    CHECK(cons.k_g_bar == 0.0);

    // Scalar linear node xdot = -2x with unit diffusion.
    ModelConstants lin =
        analytic_constants(NodeModel::linear(scalar_matrix(-2.0), scalar_matrix(1.0)));
    CHECK(lin.k_f == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(lin.k_g == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.k_g_bar == doctest::Approx(1.0).epsilon(1e-12));

    ModelConstants ddm = analytic_constants(NodeModel::ddm(1.0, 0.5));
    CHECK(ddm.k_f == 0.0);
    CHECK(ddm.k_g == 0.0);
    CHECK(ddm.k_g_bar == 0.0);

    // Matrix linear node: k_f is the top eigenvalue of the symmetrized drift.
    Matrix a(2, 2), g(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -3.0;
    a(0, 1) = 2.0; // symmetrized off-diagonal = 1
    g(0, 0) = 0.5;
    g(1, 1) = 2.0;
    ModelConstants mat = analytic_constants(NodeModel::linear(a, g));
    // Eigenvalues of [[-1,1],[1,-3]]: -2 +/- sqrt(2).
    CHECK(mat.k_f == doctest::Approx(-2.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mat.k_g == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mat.k_g_bar == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("analytic constants refuse unsupported cases") {
    NodeModel cust = NodeModel::custom(
        1, [](double, std::span<const double> x, std::span<double> o) { o[0] = x[0]; },
        [](double) { return Matrix(1, 1); }, NoiseMode::common, "custom-test");
    CHECK_THROWS_AS(analytic_constants(cust), UnsupportedModelError);

    // Non-symmetric diffusion matrix: no closed form offered.
    Matrix a(2, 2), g(2, 2);
    g(0, 1) = 1.0;
    CHECK_THROWS_AS(analytic_constants(NodeModel::linear(a, g)),
                    UnsupportedModelError);

    // Indefinite (negative eigenvalue) diffusion matrix likewise.
    Matrix neg(2, 2);
    neg(0, 0) = 1.0;
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(analytic_constants(NodeModel::linear(a, neg)),
                    UnsupportedModelError);
}

TEST_CASE("with_noise_mode preserves dynamics") {
    NodeModel m = NodeModel::bistable(2.0, 1.0).with_noise_mode(NoiseMode::independent);
    CHECK(m.noise_mode() == NoiseMode::independent);
    CHECK(eval1(m, 0.0, 1.0, true) == doctest::Approx(1.0));
    CHECK(NodeModel::ddm(1.0, 1.0).noise_mode() == NoiseMode::independent);
}

TEST_CASE("estimate_constants: bistable matches the closed form") {
    NodeModel m = NodeModel::bistable(5.0, 2.0);
    std::vector<double> lo = {-10.0}, hi = {10.0};
    ModelConstants c = estimate_constants(m, lo, hi, 10000, 2024);
    CHECK(c.provenance == ConstantsProvenance::sampled);
    // Sampled sup approaches r from below; Lipschitz/persistence ratios are
    // exactly sigma_n for the linear diffusion.
    CHECK(c.k_f <= 5.0 + 1e-12);
    CHECK(c.k_f >= 5.0 - 0.05);
    CHECK(c.k_g == doctest::Approx(2.0).epsilon(0.025));
    CHECK(c.k_g_bar == doctest::Approx(2.0).epsilon(0.025));
    CHECK(c.k_g_bar <= c.k_g);
}

TEST_CASE("estimate_constants: integrator is identically zero") {
    std::vector<double> lo = {-3.0}, hi = {7.0};
    ModelConstants c = estimate_constants(NodeModel::integrator(), lo, hi, 100, 1);
    CHECK(c.k_f == 0.0);
    CHECK(c.k_g == 0.0);
    CHECK(c.k_g_bar == 0.0);
}

TEST_CASE("estimate_constants: linear scalar ratios are constant") {
    NodeModel m = NodeModel::linear(scalar_matrix(3.0), scalar_matrix(0.5));
    std::vector<double> lo = {-1.0}, hi = {1.0};
    ModelConstants c = estimate_constants(m, lo, hi, 1000, 11);
    CHECK(c.k_f == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c.k_g == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.k_g_bar == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("estimate_constants converges to analytic constants") {
    std::vector<double> lo = {-10.0}, hi = {10.0};
    struct Case {
        NodeModel model;
        ModelConstants analytic;
    };
    std::vector<Case> cases;
    cases.push_back({NodeModel::bistable(5.0, 4.0),
                     analytic_constants(NodeModel::bistable(5.0, 4.0))});
    cases.push_back(
        {NodeModel::linear(scalar_matrix(-2.0), scalar_matrix(1.0)),
         analytic_constants(NodeModel::linear(scalar_matrix(-2.0), scalar_matrix(1.0)))});
    for (const auto& cs : cases) {
        ModelConstants s = estimate_constants(cs.model, lo, hi, 100000, 5);
        auto close = [](double sampled, double analytic) {
            return std::abs(sampled - analytic) <= 0.05 * std::max(1.0, std::abs(analytic));
        };
        CHECK(close(s.k_f, cs.analytic.k_f));
        CHECK(close(s.k_g, cs.analytic.k_g));
        CHECK(close(s.k_g_bar, cs.analytic.k_g_bar));
    }
}

TEST_CASE("estimate_constants is deterministic and ordered") {
    NodeModel m = NodeModel::bistable(4.0, 3.0);
    std::vector<double> lo = {-2.0}, hi = {2.0};
    ModelConstants a = estimate_constants(m, lo, hi, 5000, 99);
    ModelConstants b = estimate_constants(m, lo, hi, 5000, 99);
    CHECK(a.k_f == b.k_f);
    CHECK(a.k_g == b.k_g);
    CHECK(a.k_g_bar == b.k_g_bar);
    CHECK(a.k_g_bar <= a.k_g);

    ModelConstants other = estimate_constants(m, lo, hi, 5000, 100);
    CHECK(other.k_f != a.k_f); // different sample set
}

TEST_CASE("estimate_constants validation") {
    NodeModel m = NodeModel::bistable(1.0, 1.0);
    std::vector<double> lo = {-1.0}, hi = {1.0}, bad_hi = {-1.0};
    CHECK_THROWS_AS(estimate_constants(m, lo, bad_hi, 100, 1), ValidationError);
    CHECK_THROWS_AS(estimate_constants(m, lo, hi, 1, 1), ValidationError);
    std::vector<double> lo2 = {-1.0, -1.0};
    CHECK_THROWS_AS(estimate_constants(m, lo2, hi, 100, 1), ValidationError);
}
