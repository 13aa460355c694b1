#include <doctest.h>

#include <cmath>

#include "oscillab/effective_kinetic.hpp"
#include "oscillab/numerics.hpp"

using namespace oscillab;

TEST_CASE("equilibria of the cubic at zero stress") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto rep = equilibria(law, 0.0, -2.0, 2.0);
    REQUIRE(rep.roots.size() == 3);
    CHECK(rep.roots[0].xi == doctest::Approx(-1.0));
    CHECK(rep.roots[1].xi == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.roots[2].xi == doctest::Approx(1.0));
    CHECK(rep.roots[0].stable);
    CHECK_FALSE(rep.roots[1].stable);
    CHECK(rep.roots[2].stable);
    CHECK(rep.stable_roots.size() == 2);
    CHECK(rep.interleaved);
    CHECK(rep.max_root_residual <= 1e-12);
}

TEST_CASE("frozen kinetics: uniform data splits evenly") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto xi = linspace(-2.5, 2.5, 2001);
    std::vector<double> F0(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F0[k] = std::clamp((xi[k] + 2.0) / 4.0, 0.0, 1.0);
    const auto r = frozen_kinetics(xi, F0, law, 0.0, 20.0);
    REQUIRE(r.report.weights.size() == 2);
    CHECK(r.report.weights[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.distance_to_limit <= 0.01);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(r.measured_weights[i] - r.report.weights[i]) <= 1e-3);
}

TEST_CASE("frozen kinetics: one basin goes to a single Heaviside") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto xi = linspace(-2.5, 2.5, 2001);
    std::vector<double> F0(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F0[k] = std::clamp((xi[k] - 0.2) / 1.5, 0.0, 1.0);
    const auto r = frozen_kinetics(xi, F0, law, 0.0, 20.0);
    const auto H = step_column(1.0, xi);
    CHECK(column_distance(xi, r.F, H) <= 0.01);
    CHECK(r.report.weights[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("effective system: equilibrium at rest stays put and keeps mass") {
    // sigma = xi - 1 with a ramp centred on the root: the discrete mean stress is exactly 0
    const auto law = ConstitutiveLaw::linear(1.0, -1.0);
    const auto xi = linspace(-1.0, 3.0, 401);
    const std::size_t N = 16;
    std::vector<double> xc(N);
    for (std::size_t j = 0; j < N; ++j) xc[j] = (j + 0.5) / N;
    KineticField F0({0.0}, xc, xi);
    std::vector<double> col(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) col[k] = xi[k] < 1.0 - 1e-9 ? 0.0 : (xi[k] > 1.0 + 1e-9 ? 1.0 : 0.5);
    for (std::size_t j = 0; j < N; ++j) std::copy(col.begin(), col.end(), F0.column(0, j).begin());
    for (auto form : {EffectiveForm::Velocity, EffectiveForm::Stress}) {
        EffectiveOptions opt;
        opt.form = form;
        const auto tr = solve_effective(F0, [](double) { return 0.0; }, law, 0.2, {0.0, 0.2}, opt);
        CHECK(tr.max_mass_defect <= 1e-10);
        double moved = 0.0;
        for (std::size_t j = 0; j < N; ++j) moved = std::max(moved, column_distance(xi, tr.F.column(1, j), col));
        CHECK(moved <= 1e-10);
        for (double v : tr.v.back()) CHECK(std::abs(v) <= 1e-10);
    }
}

TEST_CASE("both effective forms agree") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto xi = linspace(-2.5, 2.5, 1001);
    const std::size_t N = 16;
    std::vector<double> xc(N);
    for (std::size_t j = 0; j < N; ++j) xc[j] = (j + 0.5) / N;
    KineticField F0({0.0}, xc, xi);
    for (std::size_t j = 0; j < N; ++j) {
        const auto c = step_column(1.2 + 0.1 * std::cos(kPi * xc[j]), xi);
        std::copy(c.begin(), c.end(), F0.column(0, j).begin());
    }
    auto v0 = [](double x) { return 0.05 * std::sin(kPi * x); };
    EffectiveOptions a, b;
    a.form = EffectiveForm::Velocity;
    b.form = EffectiveForm::Stress;
    a.dt = b.dt = 1e-3;
    const auto ta = solve_effective(F0, v0, law, 0.1, {0.1}, a);
    const auto tb = solve_effective(F0, v0, law, 0.1, {0.1}, b);
    double diff = 0.0;
    for (std::size_t j = 0; j < N; ++j) diff = std::max(diff, std::abs(ta.u_bar.back()[j] - tb.u_bar.back()[j]));
    CHECK(diff <= 1e-2);
    CHECK(ta.max_mass_defect <= 1e-10);
    CHECK(tb.max_mass_defect <= 1e-10);
}

TEST_CASE("kinetic sign test") {
    const auto t = linspace(0.0, 1.0, 21);
    const auto xi = linspace(-2.0, 2.0, 201);
    auto speed = [](double u) { return u; };
    // a constant state pairs to zero up to the trapezoid error of the bump integrals
    const auto calm = stationary_jump_field(0.5, 0.5, t, 128, xi);
    CHECK(std::abs(generalized_kinetic_sign_test(calm, speed).max_value) <= 1e-5);
    // an upward stationary jump violates entropy for Burgers
    const auto bad = stationary_jump_field(-1.0, 1.0, t, 128, xi);
    CHECK(generalized_kinetic_sign_test(bad, speed).max_value >= 1e-2);
}

TEST_CASE("Tartar spread") {
    const auto xi = linspace(0.0, 3.0, 301);
    auto speed = [](double u) { return u; };
    KineticField step({0.0}, {0.5}, xi);
    step.F = step_column(1.0, xi);
    CHECK(tartar_spread(step, speed).max_spread[0] == 0.0);
    const auto tp = two_point_cdf(0.5, 1.0, 2.0, xi);
    CHECK(tartar_spread(tp, speed).max_spread[0] == doctest::Approx(0.25).epsilon(0.01));
}
