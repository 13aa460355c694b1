#include <doctest.h>

#include <cmath>

#include "oscillab/exact_solutions.hpp"

using namespace oscillab;

namespace {

ConstitutiveLaw shear13() {
    return build_matched_shear_stress(1.0, 3.0, [](double u) { return u - 3.0; });
}

TwoPhaseSpec spec(double a, double b, double theta, int n = 1, int d = 1) {
    TwoPhaseSpec s;
    s.a = a;
    s.b = b;
    s.theta = theta;
    s.n = n;
    s.d = d;
    return s;
}

}  // namespace

TEST_CASE("Lagrangian family: phase values and velocity continuity") {
    const auto s = spec(1.0, 2.0, 0.5);
    CHECK(lagrangian_two_phase(s, 1.0, 0.25).u == 1.0);
    CHECK(lagrangian_two_phase(s, 1.0, 0.75).u == 2.0);
    for (double t : {1.0, 1.3, 2.0})
        for (int k : {-1, 0, 2}) {
            const double x = k + s.theta;
            const double left = lagrangian_two_phase(s, t, std::nextafter(x, -1e9)).v;
            const double right = lagrangian_two_phase(s, t, x).v;
            CHECK(std::abs(left - right) <= 1e-12);
            CHECK(right == doctest::Approx(k * s.c_theta() + s.theta * s.a));
        }
    CHECK_THROWS_AS(lagrangian_two_phase(s, 2.5, 0.0), std::domain_error);
}

TEST_CASE("rescaled Lagrangian strain averages to c_theta t") {
    const auto s = spec(1.0, 2.0, 0.5, 64);
    for (double t : {1.0, 1.5, 2.0}) {
        const int m = 64 * 200;
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += lagrangian_rescaled(s, t, -1.0 + (i + 0.5) * 2.0 / m).u;
        CHECK(std::abs(acc / m - 1.5 * t) <= 1.0 / 64);
    }
}

TEST_CASE("Eulerian 1-D and shell families") {
    const auto s = spec(1.0, 2.0, 0.5);
    CHECK(eulerian_shear_1d(s, 1.0, 0.1).rho == 1.0);
    CHECK(eulerian_shear_1d(s, 2.0, 3.0).u == 1.5);
    const auto m = spec(1.0, 5.0, 0.6, 1, 2);
    CHECK(cns_multid(m, 2.0, 1.0).rho == doctest::Approx(0.25));
    CHECK(cns_multid(m, 2.0, 1.0).u == doctest::Approx(0.5));
}

TEST_CASE("shell density averages to the two-phase mean") {
    const auto m = spec(1.0, 5.0, 0.6, 64, 2);
    for (double t : {1.0, 2.0}) {
        // radial average with the area weight r
        const int k = 64 * 400;
        double num = 0.0, den = 0.0;
        for (int i = 0; i < k; ++i) {
            const double r = (i + 0.5) / k;
            num += r * cns_multid(m, t, r).rho;
            den += r;
        }
        const double expect = (0.6 * 1.0 + 0.4 * 5.0) / (t * t);
        CHECK(std::abs(num / den - expect) <= 5.0 / 64);
    }
}

TEST_CASE("Rankine-Hugoniot residuals of matched families") {
    const auto tg = linspace(1.0, 2.0, 101);
    const auto s = spec(1.0, 3.0, 0.5);
    const auto law = shear13();
    const auto rh = rh_residual_lagrangian(s, law, LagrangianModel::Shear, tg);
    CHECK(max_flux_jump(rh) <= 1e-10);
    CHECK(max_mass_jump(rh) <= 1e-10);

    const auto m = spec(1.0, 8.0, 0.5, 1, 2);
    const auto p = build_matched_pressure(1.0, 8.0, 2, [](double r) { return r; });
    CHECK(multid_pressure_matched(p, m));
    CHECK(max_flux_jump(rh_residual_multid(m, p, 1.0, 1.0, tg)) <= 1e-10);
    // b -> b + 0.05 without rebuilding the law
    auto off = m;
    off.b += 0.05;
    CHECK(max_flux_jump(rh_residual_multid(off, p, 1.0, 1.0, tg)) >= 1e-3);
    auto offl = s;
    offl.b += 0.05;
    CHECK(max_flux_jump(rh_residual_lagrangian(offl, law, LagrangianModel::Shear, tg)) >= 1e-3);
}

TEST_CASE("weak residual of a constant state vanishes") {
    WeakFamily fam;
    fam.equations.push_back([](double, double, double, double phi_t, double phi_x) { return 2.5 * phi_t + 0.7 * phi_x; });
    const auto r = weak_residual(fam, test_catalogue(-1.0, 1.0), 256, 256);
    CHECK(r.per_test.size() == 12);
    CHECK(r.max_abs <= 1e-13);
}

TEST_CASE("weak residual of matched families reaches the quadrature plateau") {
    const auto s = spec(1.0, 3.0, 0.5);
    const auto fam = lagrangian_weak_family(s, shear13(), LagrangianModel::Shear);
    const auto tests = test_catalogue(-1.0, 1.0);
    double prev = INFINITY;
    for (int q : {128, 256, 512, 2048}) {
        const double r = weak_residual(fam, tests, q, q).max_abs;
        if (prev > 1e-9) CHECK((r <= 1e-9 || prev / r >= 3.0));
        prev = r;
    }
    CHECK(prev <= 1e-6);
}

TEST_CASE("unmatched family is caught by the weak residual") {
    auto s = spec(1.0, 3.05, 0.5);
    const auto fam = lagrangian_weak_family(s, shear13(), LagrangianModel::Shear);
    CHECK(weak_residual(fam, test_catalogue(-1.0, 1.0), 512, 512).max_abs >= 1e-2);
}

TEST_CASE("twinning: condition holds and rank-one convexity fails") {
    TwinningSpec ts;
    ts.F0 = Eigen::Matrix2d::Zero();
    ts.a = Eigen::Vector2d(1.0, 0.0);
    ts.b = Eigen::Vector2d(3.0, 0.0);
    ts.nu = Eigen::Vector2d(1.0, 0.0);
    const auto tg = linspace(1.0, 2.0, 101);
    const auto rep = twinning_check(ts, shear13(), tg);
    CHECK(rep.condition_residual <= 1e-10);
    CHECK(rep.roc_checked);
    CHECK(rep.roc_violated);
    CHECK(rep.roc_min_form < 0.0);

    ts.b = ts.a;
    const auto same = twinning_check(ts, shear13(), tg);
    CHECK(same.condition_residual == 0.0);
    CHECK_FALSE(same.roc_checked);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(spec(1.2, 2.0, 0.5).validate_lagrangian(), std::invalid_argument);
    CHECK_THROWS_AS(spec(1.0, 4.0, 0.5, 1, 3).validate_cns(), std::invalid_argument);
    CHECK_THROWS_AS(spec(1.0, 3.0, 1.0).validate_lagrangian(), std::invalid_argument);
    CHECK_NOTHROW(spec(1.0, 8.0, 0.5, 1, 2).validate_cns());
}
