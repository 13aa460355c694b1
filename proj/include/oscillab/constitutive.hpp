// Scalar stress / pressure laws: tabulated piecewise-cubic Hermite or analytic cubic.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace oscillab {

enum class LawKind { StressShear, StressGas, Pressure, AnalyticCubic, Tabulated };

std::string to_string(LawKind k);
LawKind law_kind_from_string(const std::string& s);

// Which identity a matched law satisfies.
enum class MatchIdentity { Shear, Gas, Pressure };

struct MatchSpec {
    double a = 0.0;
    double b = 0.0;
    int d = 1;  // only used by Pressure
    MatchIdentity identity = MatchIdentity::Shear;
};

class ConstitutiveLaw {
public:
    // Hermite data: knots x, values y, one-sided slopes at each knot.
    ConstitutiveLaw(LawKind kind, std::vector<double> knots, std::vector<double> values,
                    std::vector<double> slope_left, std::vector<double> slope_right,
                    double ext_slope_lo, double ext_slope_hi);

    static ConstitutiveLaw analytic_cubic(double shift);

    // PCHIP through (x, y) on a single branch; affine extensions with boundary slope.
    static ConstitutiveLaw tabulated(std::vector<double> x, std::vector<double> y,
                                     LawKind kind = LawKind::Tabulated);

    // sigma(u) = slope * u + offset, exact.
    static ConstitutiveLaw linear(double slope, double offset = 0.0);

    double operator()(double u) const { return value(u); }
    double value(double u) const;
    double deriv(double u) const;
    // W(u) = int_0^u sigma
    double energy(double u) const;

    // Thermodynamic internal energy h(rho) = rho * int_1^rho p(s)/s^2 ds (pressure laws).
    double internal_energy(double rho) const;

    LawKind kind() const { return kind_; }
    bool is_analytic() const { return analytic_; }
    double shift() const { return shift_; }
    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& slopes_left() const { return dl_; }
    const std::vector<double>& slopes_right() const { return dr_; }
    const std::optional<MatchSpec>& match_spec() const { return match_; }
    void set_match_spec(MatchSpec m) { match_ = m; }
    double domain_lo() const;
    double domain_hi() const;

    // Copy with value at knot i shifted by delta (slopes kept).
    ConstitutiveLaw perturbed(std::size_t knot, double delta) const;

    // Extremes of sigma' over a sampled window.
    std::pair<double, double> derivative_range(double lo, double hi, std::size_t samples = 2001) const;

    nlohmann::json to_json() const;
    static ConstitutiveLaw from_json(const nlohmann::json& j);
    // FNV-1a over the JSON dump; stable identifier for manifests.
    std::string hash() const;

private:
    ConstitutiveLaw() = default;
    void build_cumulative();
    std::size_t segment(double u) const;
    double primitive(double u) const;  // int_{x0}^u sigma

    LawKind kind_ = LawKind::Tabulated;
    bool analytic_ = false;
    double shift_ = 0.0;
    double lin_slope_ = 0.0, lin_offset_ = 0.0;
    bool linear_ = false;
    std::vector<double> x_, y_, dl_, dr_;
    double ext_lo_ = 1e-3, ext_hi_ = 1e-3;
    std::vector<double> cum_;  // cumulative integrals from x_[0]
    double prim0_ = 0.0;       // primitive(0)
    std::optional<MatchSpec> match_;
};

constexpr double kMinExtensionSlope = 1e-3;

// a + sigma(tau a) = b + sigma(tau b), tau in [1,2]; branch sampled on [b, 2b].
ConstitutiveLaw build_matched_shear_stress(double a, double b,
                                           const std::function<double(double)>& right_branch,
                                           std::size_t knots_per_branch = 64);

// sigma(tau a) = sigma(tau b), tau in [1,2].
ConstitutiveLaw build_matched_gas_stress(double a, double b,
                                         const std::function<double(double)>& right_branch,
                                         std::size_t knots_per_branch = 64);

// p(a / t^d) = p(b / t^d), t in [1,2]; branch sampled on [b / 2^d, b].
ConstitutiveLaw build_matched_pressure(double a, double b, int d,
                                       const std::function<double(double)>& branch,
                                       std::size_t knots_per_branch = 64);

// Max defect of the chosen identity over a uniform grid of [1,2].
double matching_residual(const ConstitutiveLaw& law, MatchIdentity identity, double a, double b,
                         int d = 1, std::size_t grid_size = 1001);

// Growth ratio max |sigma(u)| / (1 + |u|^(p-1)) over samples of [lo, hi].
double growth_ratio(const ConstitutiveLaw& law, double p, double lo, double hi,
                    std::size_t samples = 2001);

}  // namespace oscillab
