#include <doctest.h>

#include <cmath>

#include "oscillab/numerics.hpp"
#include "oscillab/young_measure.hpp"

using namespace oscillab;

namespace {

std::vector<double> centers(std::size_t N) {
    std::vector<double> x(N);
    for (std::size_t j = 0; j < N; ++j) x[j] = (j + 0.5) / N;
    return x;
}

}  // namespace

TEST_CASE("constant field gives a step") {
    const auto xi = linspace(0.0, 2.0, 201);
    const auto F = empirical_cdf_field({0.0}, centers(64), {std::vector<double>(64, 1.0)}, 0.1, xi);
    for (std::size_t ix = 0; ix < F.nx(); ++ix) {
        auto c = F.column(0, ix);
        for (std::size_t k = 0; k < xi.size(); ++k) CHECK(c[k] == (xi[k] < 1.0 ? 0.0 : 1.0));
    }
    CHECK(check_invariants(F).ok);
}

TEST_CASE("two-phase counts") {
    const std::size_t N = 2000;
    const auto x = centers(N);
    std::vector<double> u(N);
    // 20 periods of width 0.05, phase 1 on the first 30 percent
    for (std::size_t j = 0; j < N; ++j) u[j] = std::fmod(x[j] * 20.0, 1.0) < 0.3 ? 1.0 : 2.0;
    const auto xi = linspace(0.5, 2.5, 201);
    const auto F = empirical_cdf_field({0.0}, x, {u}, 0.25, xi, {0.5});
    const std::size_t cells = 1001;  // cells within the window
    const double at = F.column(0, 0)[100];  // xi = 1.5
    CHECK(std::abs(at - 0.3) <= 1.0 / cells);
}

TEST_CASE("alternating values, even window count") {
    const std::size_t N = 64;
    std::vector<double> u(N);
    for (std::size_t j = 0; j < N; ++j) u[j] = j % 2 ? 1.0 : -1.0;
    const auto xi = linspace(-2.0, 2.0, 5);
    // window half-width 3.5 cells around a node: 8 cells
    const double dx = 1.0 / N;
    const auto F = empirical_cdf_field({0.0}, centers(N), {u}, 3.5 * dx + 1e-12, xi, {0.5});
    CHECK(F.column(0, 0)[2] == 0.5);
}

TEST_CASE("moments") {
    const auto xi = linspace(0.0, 3.0, 301);
    const auto step = step_column(1.2, xi);
    // a node-aligned jump is read as a ramp over one cell: mean sits h/2 below
    const double h = xi[1] - xi[0];
    CHECK(std::abs(column_moment(xi, step, Integrand::identity()) - 1.2) <= 0.5 * h + 1e-12);
    CHECK(column_moment(xi, step, Integrand::one()) == doctest::Approx(1.0).epsilon(1e-12));

    const auto tp = two_point_column(0.5, 1.0, 2.0, xi);
    CHECK(std::abs(column_moment(xi, tp, Integrand::identity()) - 1.5) <= 0.5 * h + 1e-12);
    const auto cubic = ConstitutiveLaw::analytic_cubic(0.0);
    CHECK(column_moment(xi, tp, Integrand::stress(cubic)) == doctest::Approx(3.0).epsilon(1e-2));

    // the two forms agree
    for (const auto& g : {Integrand::identity(), Integrand::power(3), Integrand::stress(cubic)}) {
        const double base = column_moment(xi, tp, g);
        CHECK(std::abs(column_moment_anchored(xi, tp, g, 0.0) - base) <= 1e-10);
        CHECK(std::abs(column_moment_anchored(xi, tp, g, 1.7) - base) <= 1e-10);
    }
}

TEST_CASE("moment is exact for piecewise-linear F") {
    // uniform on [1, 2]: F rises linearly between nodes, mean 1.5, second moment 7/3
    const auto xi = linspace(0.0, 3.0, 31);
    std::vector<double> F(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F[k] = std::clamp(xi[k] - 1.0, 0.0, 1.0);
    CHECK(column_moment(xi, F, Integrand::identity()) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(column_moment(xi, F, Integrand::power(2)) == doctest::Approx(7.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("two-point cdf") {
    const auto xi = linspace(0.0, 3.0, 31);
    const auto K = two_point_cdf(0.3, 1.0, 2.0, xi);
    CHECK(K.F[15] == 0.3);
    CHECK(K.F[10] == 0.3);  // right-continuous at a
    CHECK(K.F[20] == 1.0);
    CHECK(K.F[9] == 0.0);
    const auto single = two_point_column(1.0, 1.0, 2.0, xi);
    CHECK(single == step_column(1.0, xi));
    CHECK(std::abs(column_moment(xi, K.F, Integrand::identity()) - 1.7) <= 0.5 * (xi[1] - xi[0]) + 1e-12);
}

TEST_CASE("cdf distance") {
    const auto xi = linspace(0.0, 3.0, 301);
    const auto a = step_column(1.0, xi), b = step_column(1.1, xi);
    CHECK(column_distance(xi, a, a) == 0.0);
    CHECK(column_distance(xi, a, b) == doctest::Approx(0.1).epsilon(0.1));
    const auto tp = two_point_column(0.5, 1.0, 2.0, xi);
    CHECK(column_distance(xi, tp, step_column(1.5, xi)) == doctest::Approx(0.5).epsilon(0.02));

    KineticField F1({0.0}, {0.5}, xi), F2({0.0}, {0.5}, linspace(0.0, 3.0, 300));
    CHECK_THROWS(cdf_distance(F1, F2));
}

TEST_CASE("spread") {
    const auto xi = linspace(0.0, 3.0, 301);
    CHECK(column_spread(xi, step_column(1.0, xi)) == 0.0);
    CHECK(column_spread(xi, two_point_column(0.5, 1.0, 2.0, xi)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("invariant checks catch broken fields") {
    const auto xi = linspace(0.0, 1.0, 11);
    KineticField K({0.0}, {0.5}, xi);
    K.F = step_column(0.5, xi);
    CHECK(check_invariants(K).ok);
    K.F[7] = 0.4;
    const auto r = check_invariants(K);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.monotone);
    K.F = step_column(0.5, xi);
    K.F.back() = 0.9;
    CHECK_FALSE(check_invariants(K).endpoints);
    K.F = step_column(0.5, xi);
    K.F[9] = 1.2;
    CHECK_FALSE(check_invariants(K).bounds);
}

TEST_CASE("normalization of empirical fields from oscillating data") {
    const std::size_t N = 512;
    const auto x = centers(N);
    std::vector<std::vector<double>> u(3, std::vector<double>(N));
    for (std::size_t it = 0; it < 3; ++it)
        for (std::size_t j = 0; j < N; ++j) u[it][j] = std::sin(40 * x[j] + it) + 0.1 * it;
    const auto xi = default_xi_grid(-1.2, 1.4);
    const auto F = empirical_cdf_field({0.0, 0.1, 0.2}, x, u, 4.0 / 16, xi, centers(32));
    CHECK(check_invariants(F).ok);
    CHECK(F.window_clipped);
    for (double m : moment(F, Integrand::one())) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
}
