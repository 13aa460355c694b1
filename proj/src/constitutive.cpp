#include "oscillab/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "oscillab/numerics.hpp"

namespace oscillab {

std::string to_string(LawKind k) {
    switch (k) {
        case LawKind::StressShear: return "stress-shear";
        case LawKind::StressGas: return "stress-gas";
        case LawKind::Pressure: return "pressure";
        case LawKind::AnalyticCubic: return "analytic-cubic";
        case LawKind::Tabulated: return "tabulated";
    }
    return "tabulated";
}

LawKind law_kind_from_string(const std::string& s) {
    if (s == "stress-shear") return LawKind::StressShear;
    if (s == "stress-gas") return LawKind::StressGas;
    if (s == "pressure") return LawKind::Pressure;
    if (s == "analytic-cubic") return LawKind::AnalyticCubic;
    if (s == "tabulated") return LawKind::Tabulated;
    throw std::invalid_argument("unknown law kind '" + s + "'");
}

namespace {

std::string identity_name(MatchIdentity id) {
    switch (id) {
        case MatchIdentity::Shear: return "shear";
        case MatchIdentity::Gas: return "gas";
        case MatchIdentity::Pressure: return "pressure";
    }
    return "shear";
}

MatchIdentity identity_from(const std::string& s) {
    if (s == "shear") return MatchIdentity::Shear;
    if (s == "gas") return MatchIdentity::Gas;
    if (s == "pressure") return MatchIdentity::Pressure;
    throw std::invalid_argument("unknown match identity '" + s + "'");
}

}  // namespace

ConstitutiveLaw::ConstitutiveLaw(LawKind kind, std::vector<double> knots, std::vector<double> values,
                                 std::vector<double> slope_left, std::vector<double> slope_right,
                                 double ext_slope_lo, double ext_slope_hi)
    : kind_(kind),
      x_(std::move(knots)),
      y_(std::move(values)),
      dl_(std::move(slope_left)),
      dr_(std::move(slope_right)),
      ext_lo_(ext_slope_lo),
      ext_hi_(ext_slope_hi) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n || dl_.size() != n || dr_.size() != n)
        throw std::invalid_argument("law: knots/values/slopes size mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i + 1] > x_[i])) throw std::invalid_argument("law: knots must be strictly increasing");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(y_[i]) || !std::isfinite(dl_[i]) || !std::isfinite(dr_[i]))
            throw std::invalid_argument("law: non-finite knot data");
    build_cumulative();
}

ConstitutiveLaw ConstitutiveLaw::analytic_cubic(double shift) {
    ConstitutiveLaw law;
    law.kind_ = LawKind::AnalyticCubic;
    law.analytic_ = true;
    law.shift_ = shift;
    return law;
}

ConstitutiveLaw ConstitutiveLaw::linear(double slope, double offset) {
    ConstitutiveLaw law;
    law.kind_ = LawKind::Tabulated;
    law.linear_ = true;
    law.lin_slope_ = slope;
    law.lin_offset_ = offset;
    return law;
}

ConstitutiveLaw ConstitutiveLaw::tabulated(std::vector<double> x, std::vector<double> y, LawKind kind) {
    auto d = pchip_slopes(x, y);
    const double lo = d.front(), hi = d.back();
    return ConstitutiveLaw(kind, std::move(x), std::move(y), d, d, lo, hi);
}

void ConstitutiveLaw::build_cumulative() {
    cum_.assign(x_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const HermiteSeg seg{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], dr_[i], dl_[i + 1]};
        cum_[i + 1] = cum_[i] + seg.integral_to(x_[i + 1]);
    }
    prim0_ = primitive(0.0);
}

std::size_t ConstitutiveLaw::segment(double u) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, x_.size() - 2);
}

double ConstitutiveLaw::value(double u) const {
    if (analytic_) return u * u * u - u + shift_;
    if (linear_) return lin_slope_ * u + lin_offset_;
    if (u < x_.front()) return y_.front() + ext_lo_ * (u - x_.front());
    if (u > x_.back()) return y_.back() + ext_hi_ * (u - x_.back());
    const std::size_t i = segment(u);
    const HermiteSeg seg{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], dr_[i], dl_[i + 1]};
    return seg.value(u);
}

double ConstitutiveLaw::deriv(double u) const {
    if (analytic_) return 3.0 * u * u - 1.0;
    if (linear_) return lin_slope_;
    if (u < x_.front()) return ext_lo_;
    if (u > x_.back()) return ext_hi_;
    const std::size_t i = segment(u);
    const HermiteSeg seg{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], dr_[i], dl_[i + 1]};
    return seg.deriv(u);
}

double ConstitutiveLaw::primitive(double u) const {
    if (u < x_.front()) {
        const double w = x_.front() - u;
        return -(y_.front() * w - 0.5 * ext_lo_ * w * w);
    }
    if (u > x_.back()) {
        const double w = u - x_.back();
        return cum_.back() + y_.back() * w + 0.5 * ext_hi_ * w * w;
    }
    const std::size_t i = segment(u);
    const HermiteSeg seg{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], dr_[i], dl_[i + 1]};
    return cum_[i] + seg.integral_to(u);
}

double ConstitutiveLaw::energy(double u) const {
    if (analytic_) return 0.25 * u * u * u * u - 0.5 * u * u + shift_ * u;
    if (linear_) return 0.5 * lin_slope_ * u * u + lin_offset_ * u;
    return primitive(u) - prim0_;
}

double ConstitutiveLaw::internal_energy(double rho) const {
    if (!(rho > 0.0)) throw std::invalid_argument("internal_energy: density must be positive");
    const double lo = std::min(1.0, rho), hi = std::max(1.0, rho);
    std::vector<double> cuts{lo};
    for (double k : x_)
        if (k > lo && k < hi) cuts.push_back(k);
    cuts.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += gauss_integrate([this](double s) { return value(s) / (s * s); }, cuts[i], cuts[i + 1], 20);
    return rho * (rho >= 1.0 ? acc : -acc);
}

double ConstitutiveLaw::domain_lo() const { return x_.empty() ? -1.0 : x_.front(); }
double ConstitutiveLaw::domain_hi() const { return x_.empty() ? 1.0 : x_.back(); }

ConstitutiveLaw ConstitutiveLaw::perturbed(std::size_t knot, double delta) const {
    if (analytic_ || linear_) throw std::invalid_argument("perturbed: law has no knots");
    ConstitutiveLaw out = *this;
    out.y_.at(knot) += delta;
    out.build_cumulative();
    return out;
}

std::pair<double, double> ConstitutiveLaw::derivative_range(double lo, double hi, std::size_t samples) const {
    double mn = INFINITY, mx = -INFINITY;
    for (double u : linspace(lo, hi, samples)) {
        const double d = deriv(u);
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    if (!analytic_ && !linear_) {
        // one-sided slopes at knots inside the window
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (x_[i] < lo || x_[i] > hi) continue;
            mn = std::min({mn, dl_[i], dr_[i]});
            mx = std::max({mx, dl_[i], dr_[i]});
        }
    }
    return {mn, mx};
}

nlohmann::json ConstitutiveLaw::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    if (analytic_) {
        j["shift"] = shift_;
        j["knots"] = nlohmann::json::array();
        j["values"] = nlohmann::json::array();
    } else if (linear_) {
        j["linear"] = {{"slope", lin_slope_}, {"offset", lin_offset_}};
        j["knots"] = nlohmann::json::array();
        j["values"] = nlohmann::json::array();
    } else {
        j["knots"] = x_;
        j["values"] = y_;
        j["slopes_left"] = dl_;
        j["slopes_right"] = dr_;
        j["extension_slopes"] = {ext_lo_, ext_hi_};
    }
    if (match_) {
        j["match_spec"] = {{"a", match_->a},
                           {"b", match_->b},
                           {"d", match_->d},
                           {"identity", identity_name(match_->identity)},
                           {"interval", {1.0, 2.0}}};
    } else {
        j["match_spec"] = nullptr;
    }
    return j;
}

ConstitutiveLaw ConstitutiveLaw::from_json(const nlohmann::json& j) {
    const LawKind kind = law_kind_from_string(j.at("kind").get<std::string>());
    ConstitutiveLaw law = [&] {
        if (kind == LawKind::AnalyticCubic) return analytic_cubic(j.value("shift", 0.0));
        if (j.contains("linear")) {
            auto l = linear(j["linear"].at("slope").get<double>(), j["linear"].value("offset", 0.0));
            l.kind_ = kind;
            return l;
        }
        auto x = j.at("knots").get<std::vector<double>>();
        auto y = j.at("values").get<std::vector<double>>();
        if (!j.contains("slopes_left")) return tabulated(std::move(x), std::move(y), kind);
        auto dl = j.at("slopes_left").get<std::vector<double>>();
        auto dr = j.at("slopes_right").get<std::vector<double>>();
        auto ext = j.at("extension_slopes").get<std::vector<double>>();
        if (ext.size() != 2) throw std::invalid_argument("law: extension_slopes needs two entries");
        return ConstitutiveLaw(kind, std::move(x), std::move(y), std::move(dl), std::move(dr), ext[0], ext[1]);
    }();
    if (j.contains("match_spec") && !j["match_spec"].is_null()) {
        const auto& m = j["match_spec"];
        law.match_ = MatchSpec{m.at("a").get<double>(), m.at("b").get<double>(), m.value("d", 1),
                               identity_from(m.value("identity", std::string("shear")))};
    }
    return law;
}

std::string ConstitutiveLaw::hash() const {
    const std::string s = to_json().dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct Branch {
    std::vector<double> x, y, d;
};

Branch sample_branch(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    if (n < 3) throw std::invalid_argument("matched law: need at least 3 knots per branch");
    Branch br;
    br.x = linspace(lo, hi, n);
    br.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) br.y[i] = f(br.x[i]);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(br.y[i + 1] > br.y[i]))
            throw std::invalid_argument("matched law: branch must be strictly increasing");
    br.d = pchip_slopes(br.x, br.y);
    return br;
}

// Left branch as the image of the right one under x -> scale * x, y -> y + offset.
Branch map_branch(const Branch& right, double scale, double offset) {
    Branch br;
    const std::size_t n = right.x.size();
    br.x.resize(n);
    br.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        br.x[i] = scale * right.x[i];
        br.y[i] = right.y[i] + offset;
    }
    br.d = pchip_slopes(br.x, br.y);
    return br;
}

void append_branch(const Branch& br, std::vector<double>& x, std::vector<double>& y,
                   std::vector<double>& dl, std::vector<double>& dr) {
    x.insert(x.end(), br.x.begin(), br.x.end());
    y.insert(y.end(), br.y.begin(), br.y.end());
    dl.insert(dl.end(), br.d.begin(), br.d.end());
    dr.insert(dr.end(), br.d.begin(), br.d.end());
}

ConstitutiveLaw build_matched_stress(double a, double b, const std::function<double(double)>& right_branch,
                                     std::size_t nk, double offset, LawKind kind, MatchIdentity id) {
    if (!(a > 0.0) || !(2.0 * a < b))
        throw std::invalid_argument("matched law: need 0 < a < 2a < b");
    const Branch right = sample_branch(right_branch, b, 2.0 * b, nk);
    const Branch left = map_branch(right, a / b, offset);
    if (!(left.y.back() > right.y.front()))
        throw std::invalid_argument("matched law: middle branch would not be decreasing");
    std::vector<double> x, y, dl, dr;
    append_branch(left, x, y, dl, dr);
    // flat-ended decreasing cubic across (2a, b)
    dr.back() = 0.0;
    append_branch(right, x, y, dl, dr);
    dl[nk] = 0.0;
    const double lo = std::max(left.d.front(), kMinExtensionSlope);
    const double hi = std::max(right.d.back(), kMinExtensionSlope);
    ConstitutiveLaw law(kind, std::move(x), std::move(y), std::move(dl), std::move(dr), lo, hi);
    law.set_match_spec(MatchSpec{a, b, 1, id});
    return law;
}

}  // namespace

ConstitutiveLaw build_matched_shear_stress(double a, double b, const std::function<double(double)>& right_branch,
                                           std::size_t knots_per_branch) {
    return build_matched_stress(a, b, right_branch, knots_per_branch, b - a, LawKind::StressShear,
                                MatchIdentity::Shear);
}

ConstitutiveLaw build_matched_gas_stress(double a, double b, const std::function<double(double)>& right_branch,
                                         std::size_t knots_per_branch) {
    return build_matched_stress(a, b, right_branch, knots_per_branch, 0.0, LawKind::StressGas,
                                MatchIdentity::Gas);
}

ConstitutiveLaw build_matched_pressure(double a, double b, int d, const std::function<double(double)>& branch,
                                       std::size_t knots_per_branch) {
    if (d < 1) throw std::invalid_argument("matched pressure: dimension must be >= 1");
    const double scale = std::pow(2.0, d);
    if (!(a > 0.0 && a / scale < a && a < b / scale && b / scale < b))
        throw std::invalid_argument("matched pressure: need 0 < a/2^d < a < b/2^d < b");
    const Branch right = sample_branch(branch, b / scale, b, knots_per_branch);
    if (!(right.y.front() > 0.0))
        throw std::invalid_argument("matched pressure: branch must be positive on [b/2^d, b]");
    const Branch left = map_branch(right, a / b, 0.0);
    const double s0 = left.y.front() / left.x.front();
    std::vector<double> x{0.0}, y{0.0}, dl{s0}, dr{s0};
    append_branch(left, x, y, dl, dr);
    dl[1] = s0;
    dr.back() = 0.0;
    append_branch(right, x, y, dl, dr);
    dl[1 + knots_per_branch] = 0.0;
    const double hi = std::max(right.d.back(), kMinExtensionSlope);
    ConstitutiveLaw law(LawKind::Pressure, std::move(x), std::move(y), std::move(dl), std::move(dr), s0, hi);
    law.set_match_spec(MatchSpec{a, b, d, MatchIdentity::Pressure});
    return law;
}

double matching_residual(const ConstitutiveLaw& law, MatchIdentity identity, double a, double b, int d,
                         std::size_t grid_size) {
    double worst = 0.0;
    for (double t : linspace(1.0, 2.0, grid_size)) {
        double r = 0.0;
        switch (identity) {
            case MatchIdentity::Shear: r = a + law(t * a) - b - law(t * b); break;
            case MatchIdentity::Gas: r = law(t * a) - law(t * b); break;
            case MatchIdentity::Pressure: {
                const double td = std::pow(t, d);
                r = law(a / td) - law(b / td);
                break;
            }
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double growth_ratio(const ConstitutiveLaw& law, double p, double lo, double hi, std::size_t samples) {
    double worst = 0.0;
    for (double u : linspace(lo, hi, samples))
        worst = std::max(worst, std::abs(law(u)) / (1.0 + std::pow(std::abs(u), p - 1.0)));
    return worst;
}

}  // namespace oscillab
