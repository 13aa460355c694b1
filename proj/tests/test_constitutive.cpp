#include <doctest.h>

#include <cmath>

#include "oscillab/constitutive.hpp"
#include "oscillab/numerics.hpp"

using namespace oscillab;

namespace {
double identity_branch(double u) { return u; }
}  // namespace

TEST_CASE("matched shear law reproduces the branch identity") {
    const auto law = build_matched_shear_stress(0.5, 2.0, identity_branch);
    // sigma(0.5 tau) = sigma(2 tau) + 2 - 0.5 = 2 tau + 1.5
    CHECK(law(0.5) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(law(1.0) == doctest::Approx(5.5).epsilon(1e-12));
    for (double tau : linspace(1.0, 2.0, 17)) CHECK(law(0.5 * tau) == doctest::Approx(2.0 * tau + 1.5).epsilon(1e-12));
    CHECK(matching_residual(law, MatchIdentity::Shear, 0.5, 2.0) <= 1e-12);
    REQUIRE(law.match_spec());
    CHECK(law.match_spec()->identity == MatchIdentity::Shear);
}

TEST_CASE("perturbing one left-branch knot breaks matching") {
    const auto law = build_matched_shear_stress(0.5, 2.0, identity_branch);
    std::size_t k = 0;
    while (law.knots()[k] < 0.75) ++k;
    const auto bad = law.perturbed(k, 0.1);
    CHECK(matching_residual(bad, MatchIdentity::Shear, 0.5, 2.0) >= 0.05);
}

TEST_CASE("matched gas law") {
    const auto law = build_matched_gas_stress(0.5, 2.0, identity_branch);
    CHECK(law(0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(law(1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(matching_residual(law, MatchIdentity::Gas, 0.5, 2.0) <= 1e-12);
    CHECK_THROWS_AS(build_matched_gas_stress(1.2, 2.0, identity_branch), std::invalid_argument);
}

TEST_CASE("builders reject bad input") {
    CHECK_THROWS_AS(build_matched_shear_stress(1.2, 2.0, identity_branch), std::invalid_argument);
    CHECK_THROWS_AS(build_matched_shear_stress(0.5, 2.0, [](double u) { return -u; }), std::invalid_argument);
}

TEST_CASE("matched pressure") {
    const auto p = build_matched_pressure(1.0, 4.0, 1, identity_branch);
    CHECK(p(1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p(4.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p(0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p(2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(p(0.0)) <= 1e-14);
    CHECK(matching_residual(p, MatchIdentity::Pressure, 1.0, 4.0, 1, 101) <= 1e-12);
    CHECK_THROWS_AS(build_matched_pressure(1.0, 4.0, 3, identity_branch), std::invalid_argument);
}

TEST_CASE("matched laws are non-monotone and meet the tolerance on a fine grid") {
    const auto shear = build_matched_shear_stress(1.0, 3.0, [](double u) { return u - 3.0; });
    CHECK(matching_residual(shear, MatchIdentity::Shear, 1.0, 3.0, 1, 1001) <= 1e-10);
    const auto [lo, hi] = shear.derivative_range(1.0, 6.0);
    CHECK(lo < 0.0);
    CHECK(hi > 0.0);
    const auto p = build_matched_pressure(1.0, 8.0, 2, identity_branch);
    const auto [plo, phi] = p.derivative_range(0.25, 8.0);
    CHECK(plo < 0.0);
    CHECK(phi > 0.0);
}

TEST_CASE("energy is an antiderivative of the law") {
    const auto law = build_matched_shear_stress(1.0, 3.0, [](double u) { return u - 3.0; });
    const double h = 1e-5;
    for (double x : law.knots()) {
        // Simpson on each side of the knot, exact for cubic pieces
        const double left = h / 6.0 * (law(x - h) + 4.0 * law(x - 0.5 * h) + law(x));
        const double right = h / 6.0 * (law(x) + 4.0 * law(x + 0.5 * h) + law(x + h));
        CHECK(std::abs(law.energy(x + h) - law.energy(x - h) - left - right) <= 1e-12);
    }
    CHECK(law.energy(0.0) == 0.0);
}

TEST_CASE("analytic cubic") {
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    CHECK(law(1.0) == doctest::Approx(0.0));
    CHECK(law.deriv(0.0) == doctest::Approx(-1.0));
    CHECK(law.deriv(1.0) == doctest::Approx(2.0));
    CHECK(law.deriv(-1.0) == doctest::Approx(2.0));
    CHECK(law.energy(0.0) == 0.0);
    for (double x : {-1.7, -0.3, 0.4, 2.2}) CHECK(law.energy(x) == doctest::Approx(x * x * x * x / 4 - x * x / 2));
    const auto shifted = ConstitutiveLaw::analytic_cubic(0.3);
    CHECK(shifted.energy(2.0) == doctest::Approx(4.0 - 2.0 + 0.6));
    // roots of S0 - sigma with S0 = shift are -1, 0, 1
    const auto roots = find_roots([&](double u) { return 0.3 - shifted(u); }, -2.0, 2.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-1.0));
    CHECK(roots[1] == doctest::Approx(0.0));
    CHECK(roots[2] == doctest::Approx(1.0));
    CHECK(growth_ratio(law, 4.0, -50.0, 50.0) <= 1.0);
}

TEST_CASE("json round trip keeps values and hash") {
    const auto law = build_matched_gas_stress(0.5, 2.0, identity_branch);
    const auto back = ConstitutiveLaw::from_json(law.to_json());
    CHECK(back.hash() == law.hash());
    for (double x : linspace(0.0, 5.0, 41)) CHECK(back(x) == law(x));
    REQUIRE(back.match_spec());
    CHECK(back.match_spec()->identity == MatchIdentity::Gas);
}

TEST_CASE("extensions are increasing and unbounded") {
    const auto law = build_matched_shear_stress(1.0, 3.0, [](double u) { return u - 3.0; });
    CHECK(law.deriv(law.domain_lo() - 1.0) >= kMinExtensionSlope);
    CHECK(law.deriv(law.domain_hi() + 1.0) >= kMinExtensionSlope);
    CHECK(law(1e4) > law(1e3));
}
