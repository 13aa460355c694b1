#include <doctest.h>

#include <cmath>

#include "oscillab/linear_modes.hpp"
#include "oscillab/numerics.hpp"
#include "oscillab/pde_direct.hpp"

using namespace oscillab;

namespace {

TwoPhaseSpec spec(double a, double b, double theta, int n) {
    TwoPhaseSpec s;
    s.a = a;
    s.b = b;
    s.theta = theta;
    s.n = n;
    return s;
}

double smooth_v(double x) { return 0.3 * x * x * (1 - x) * (1 - x); }

}  // namespace

TEST_CASE("two-phase initial data") {
    const auto ic = two_phase_ic(spec(1.0, 2.0, 0.5, 8), smooth_v);
    REQUIRE(ic.u.size() == 128);
    CHECK(ic.v.size() == 129);
    CHECK(std::count(ic.u.begin(), ic.u.end(), 1.0) == 64);
    const auto fine = two_phase_ic(spec(1.0, 2.0, 0.5, 64), smooth_v);
    double avg = 0.0;
    for (double u : fine.u) avg += u / fine.u.size();
    CHECK(std::abs(avg - 1.5) <= 1.0 / 64);
    // velocity data do not depend on n
    const auto other = two_phase_ic(spec(1.0, 2.0, 0.5, 16), smooth_v, 128);
    CHECK(other.v == ic.v);
}

TEST_CASE("equilibrium stays put") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    ShearState s;
    s.dx = 1.0 / 64;
    s.u.assign(64, 1.0);
    s.v.assign(65, 0.0);
    const auto tr = solve_viscoelastic(s, law, 0.5, {0.0, 0.5});
    for (double u : tr.snapshots.back().u) CHECK(u == 1.0);
    for (double v : tr.snapshots.back().v) CHECK(v == 0.0);
}

TEST_CASE("energy never increases and boundaries stay traction free") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto ic = two_phase_ic(spec(0.8, 1.4, 0.5, 8), [](double x) { return 0.2 * std::sin(kPi * x); });
    const auto tr = solve_viscoelastic(ic, law, 1.0, linspace(0.0, 1.0, 11));
    CHECK(tr.max_energy_increase <= 1e-8);
    for (std::size_t i = 1; i < tr.energy.size(); ++i) CHECK(tr.energy[i] <= tr.energy[i - 1] + 1e-8 * std::abs(tr.energy[0]));
    const auto d = diagnostics(tr, law);
    CHECK(d.max_boundary_stress <= 1e-8);
    CHECK(d.integral_within_bound);
    CHECK(d.sup_within_window);
    CHECK(tr.times.size() == 11);
}

TEST_CASE("linear law: slow mode decays at the slow root") {
    const double lam = 1.0, mu = 1.0;
    const int n = 4;
    const double k = 2.0 * kPi * n;
    const auto r = amplitude_roots_1d(lam, mu, k);
    const std::size_t N = 16 * n * 4;
    ShearState s;
    s.dx = 1.0 / N;
    s.u.resize(N);
    s.v.resize(N + 1);
    const double beta = -r.plus / k;
    for (std::size_t j = 0; j < N; ++j) s.u[j] = std::sin(k * s.x_cell(j));
    for (std::size_t i = 0; i <= N; ++i) s.v[i] = beta * std::cos(k * s.x_node(i));
    StepPolicy pol;
    pol.dt_max = 2e-4;
    const auto t = linspace(0.0, 1.0, 21);
    const auto tr = solve_viscoelastic(s, ConstitutiveLaw::linear(lam), 1.0, t, pol, mu);
    std::vector<double> la;
    for (const auto& snap : tr.snapshots) {
        double proj = 0.0;
        for (std::size_t j = 0; j < N; ++j) proj += 2.0 * s.dx * snap.u[j] * std::sin(k * snap.x_cell(j));
        la.push_back(std::log(std::abs(proj)));
    }
    CHECK(fit_slope(tr.times, la) == doctest::Approx(r.plus).epsilon(0.01));
}

TEST_CASE("second-order self-convergence in space") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    auto run = [&](std::size_t N) {
        ShearState s;
        s.dx = 1.0 / N;
        s.u.resize(N);
        s.v.resize(N + 1);
        for (std::size_t j = 0; j < N; ++j) s.u[j] = 0.5 + 0.2 * std::cos(kPi * s.x_cell(j));
        for (std::size_t i = 0; i <= N; ++i) s.v[i] = smooth_v(s.x_node(i));
        StepPolicy pol;
        pol.dt_max = 1e-4;
        return solve_viscoelastic(s, law, 0.1, {0.1}, pol).snapshots.back().u;
    };
    const auto u1 = run(32), u2 = run(64), u3 = run(128);
    auto diff = [](const std::vector<double>& c, const std::vector<double>& f) {
        double e = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) e = std::max(e, std::abs(c[j] - 0.5 * (f[2 * j] + f[2 * j + 1])));
        return e;
    };
    const double ratio = diff(u1, u2) / diff(u2, u3);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("diagnostics on a resting state") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    ShearState s;
    s.dx = 1.0 / 16;
    for (std::size_t j = 0; j < 16; ++j) s.u.push_back(0.1 * j);
    s.v.assign(17, 0.0);
    s.S.assign(17, 0.0);
    ShearTrajectory tr;
    tr.times = {0.0};
    tr.snapshots = {s};
    tr.energy = {shear_energy(s, law)};
    const auto d = diagnostics(tr, law);
    REQUIRE(d.g.size() == 1);
    for (std::size_t j = 0; j < 16; ++j) CHECK(d.g[0][j] == s.u[j]);
    CHECK(d.velocity_integral[0] == 0.0);
}

TEST_CASE("heat equation mode decay") {
    const double eps = 1e-2;
    const int k = 2;
    auto ic = scalar_ic([&](double x) { return std::sin(2 * kPi * k * x); }, 256, eps);
    const auto t = linspace(0.0, 0.5, 11);
    const auto tr = solve_viscous_scalar(ic, FluxLaw::zero(), 0.5, t, 0.45, 1e-4);
    std::vector<double> la;
    for (const auto& s : tr.snapshots) {
        double proj = 0.0;
        for (std::size_t j = 0; j < s.u.size(); ++j) proj += 2.0 * s.dx * s.u[j] * std::sin(2 * kPi * k * (j + 0.5) * s.dx);
        la.push_back(std::log(std::abs(proj)));
    }
    const double expect = -eps * std::pow(2 * kPi * k, 2);
    CHECK(fit_slope(tr.times, la) == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("Burgers: constants stay constant, mass and max principle") {
    auto c = scalar_ic([](double) { return 0.7; }, 64, 1e-3);
    const auto tc = solve_viscous_scalar(c, FluxLaw::burgers(), 0.2, {0.0, 0.2});
    for (double u : tc.snapshots.back().u) CHECK(u == doctest::Approx(0.7).epsilon(1e-14));

    auto ic = scalar_ic([](double x) { return std::fmod(32 * x, 1.0) < 0.5 ? 0.0 : 1.0; }, 1024, 1e-3);
    const auto tr = solve_viscous_scalar(ic, FluxLaw::burgers(), 0.5, linspace(0.0, 0.5, 11));
    for (std::size_t i = 0; i < tr.mass.size(); ++i) {
        CHECK(std::abs(tr.mass[i] - tr.mass[0]) <= 1e-12 * std::abs(tr.mass[0]));
        CHECK(tr.sup[i] <= tr.sup[0] + 1e-8);
    }
}

TEST_CASE("unknown flux names are rejected") {
    CHECK_THROWS_AS(FluxLaw::from_name("quartic"), std::invalid_argument);
    CHECK(FluxLaw::from_name("burgers").speed(2.0) == 2.0);
}
