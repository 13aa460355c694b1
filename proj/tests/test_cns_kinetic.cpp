#include <doctest.h>

#include <cmath>

#include "oscillab/cns_kinetic.hpp"
#include "oscillab/numerics.hpp"

using namespace oscillab;

namespace {

TwoPhaseSpec shell(double a, double b, int n) {
    TwoPhaseSpec s;
    s.a = a;
    s.b = b;
    s.theta = 0.5;
    s.n = n;
    s.d = 2;
    return s;
}

}  // namespace

TEST_CASE("two-phase H values") {
    CHECK(two_phase_H_value(0.5, 1.0, 2.0, 1.5) == 0.5);
    CHECK(two_phase_H_value(0.5, 1.0, 2.0, 3.0) == 1.5);
    CHECK(two_phase_H_value(0.5, 1.0, 2.0, 0.5) == 0.0);
    // theta = 1 is a single phase
    CHECK(two_phase_H_value(1.0, 1.0, 2.0, 1.5) == 1.0);
    CHECK(two_phase_H_value(1.0, 1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("density invariants") {
    const auto xi = linspace(0.0, 3.0, 31);
    DensityKineticField H({0.0}, {0.5}, xi);
    const auto col = two_phase_H(0.5, 1.0, 2.0, xi);
    std::copy(col.begin(), col.end(), H.column(0, 0).begin());
    CHECK(check_invariants(H, {1.5}).ok);
    CHECK_FALSE(check_invariants(H, {1.4}).ok);
    H.H[25] = 0.1;
    CHECK_FALSE(check_invariants(H).ok);
}

TEST_CASE("renormalized identity: matched and unmatched laws") {
    const auto s = shell(1.0, 8.0, 4);
    const auto p = build_matched_pressure(1.0, 8.0, 2, [](double r) { return r; });
    const auto good = renormalized_residual(s, p, 3.0, 512, 512);
    CHECK(good.max_approx <= 1e-4);
    CHECK(good.max_limit <= 1e-4);
    CHECK_FALSE(good.pairings.empty());
    const auto bad = renormalized_residual(s, ConstitutiveLaw::linear(1.0), 3.0, 512, 512);
    CHECK(bad.max_limit >= 1e-2);
}

TEST_CASE("xi weights integrate consistently") {
    XiWeight w{1.0, 0.5};
    CHECK(w.value(1.0) == 1.0);
    CHECK(w.value(1.6) == 0.0);
    CHECK(std::abs(w.antiderivative(0.5)) <= 1e-15);
    // int (1 - s^2)^2 over [-1,1] is 16/15, times r
    CHECK(w.antiderivative(1.5) == doctest::Approx(0.5 * 16.0 / 15.0));
    const double h = 1e-6;
    CHECK((w.antiderivative(1.2 + h) - w.antiderivative(1.2 - h)) / (2 * h) == doctest::Approx(w.value(1.2)).epsilon(1e-8));
}

TEST_CASE("stationary single phase is preserved by H transport") {
    const auto p = ConstitutiveLaw::linear(1.0);
    HTransportProblem prob;
    const double rho0 = 1.3;
    prob.u = [](double, double) { return 0.0; };
    prob.u_y = [](double, double) { return 0.0; };
    prob.p_bar = [&](double, double) { return p(rho0); };
    prob.H0 = [&](double, double xi) { return xi > rho0 ? rho0 : 0.0; };
    prob.pressure = &p;
    prob.lam2mu = 2.0;
    prob.y = linspace(0.0, 1.0, 9);
    prob.xi = linspace(0.0, 3.0, 301);
    prob.output_times = linspace(1.0, 1.5, 6);
    const auto H = solve_H_transport_1d(prob);
    CHECK(check_invariants(H, std::vector<double>(H.nt() * H.ny(), rho0), 1e-10).ok);
    for (std::size_t it = 0; it < H.nt(); ++it)
        for (std::size_t iy = 0; iy < H.ny(); ++iy) {
            const auto c = H.column(it, iy);
            for (std::size_t k = 0; k < H.nxi(); ++k)
                if (std::abs(H.xi[k] - rho0) > 0.02) CHECK(c[k] == (H.xi[k] > rho0 ? rho0 : 0.0));
        }
    CHECK(continuity_residual(H, prob.u) <= 1e-12);
}

TEST_CASE("H transport follows a compressing flow") {
    // u = -y / (2 t) compresses; density grows like sqrt(t)
    const auto p = ConstitutiveLaw::linear(1.0);
    HTransportProblem prob;
    prob.u = [](double t, double y) { return -0.5 * y / t; };
    prob.u_y = [](double t, double) { return -0.5 / t; };
    prob.p_bar = [&](double t, double) { return std::sqrt(t); };
    prob.H0 = [](double, double xi) { return xi > 1.0 ? 1.0 : 0.0; };
    prob.pressure = &p;
    prob.lam2mu = 1.0;
    prob.y = linspace(0.0, 1.0, 17);
    prob.xi = linspace(0.0, 4.0, 801);
    prob.output_times = linspace(1.0, 2.0, 41);
    const auto H = solve_H_transport_1d(prob);
    CHECK(check_invariants(H).ok);
    for (std::size_t iy = 0; iy < H.ny(); ++iy) CHECK(H.rho_bar(H.nt() - 1, iy) == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK(continuity_residual(H, prob.u) <= 0.02);
}
