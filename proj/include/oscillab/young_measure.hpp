// Distribution functions F(t,x,xi) of Young measures and their moments.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oscillab/constitutive.hpp"

namespace oscillab {

// F is stored [t][x][xi] and read as piecewise linear in xi.
struct KineticField {
    std::vector<double> t, x, xi;
    std::vector<double> F;
    std::string provenance = "synthetic";
    double window = 0.0;
    bool window_clipped = false;

    KineticField() = default;
    KineticField(std::vector<double> t_, std::vector<double> x_, std::vector<double> xi_);

    std::size_t nt() const { return t.size(); }
    std::size_t nx() const { return x.size(); }
    std::size_t nxi() const { return xi.size(); }
    std::span<double> column(std::size_t it, std::size_t ix) {
        return {F.data() + (it * nx() + ix) * nxi(), nxi()};
    }
    std::span<const double> column(std::size_t it, std::size_t ix) const {
        return {F.data() + (it * nx() + ix) * nxi(), nxi()};
    }
};

// Uniform grid on [lo - pad (hi-lo), hi + pad (hi-lo)]; a degenerate range gets unit width.
std::vector<double> default_xi_grid(double lo, double hi, std::size_t nodes = 512, double pad = 0.1);

// Fraction of cells within [x - w, x + w] holding u <= xi (right-continuous convention).
// u[it] holds cell values at the uniform centers x_cells; columns at x_out (all cells when empty).
// Periodic windows wrap around the domain instead of being clipped.
KineticField empirical_cdf_field(const std::vector<double>& times, const std::vector<double>& x_cells,
                                 const std::vector<std::vector<double>>& u, double w, const std::vector<double>& xi,
                                 const std::vector<double>& x_out = {}, bool periodic = false);

// f together with an antiderivative; the antiderivative may be left empty.
struct Integrand {
    std::function<double(double)> f, antiderivative;
    static Integrand one();
    static Integrand identity();
    static Integrand power(int k);
    static Integrand stress(const ConstitutiveLaw& law);
    // sigma'(xi) (S - sigma(xi))
    static Integrand relaxation(const ConstitutiveLaw& law, double S);
};

// int f dnu for the measure whose CDF is the piecewise-linear column, anchored at xi_min.
double column_moment(std::span<const double> xi, std::span<const double> F, const Integrand& g);
// f(anchor) - int_{xi<anchor} f' F + int_{xi>anchor} f' (1-F); needs the antiderivative.
double column_moment_anchored(std::span<const double> xi, std::span<const double> F, const Integrand& g,
                              double anchor);

// Moment field [t][x].
std::vector<double> moment(const KineticField& F, const Integrand& g);

std::vector<double> two_point_column(double theta, double a, double b, const std::vector<double>& xi);
KineticField two_point_cdf(double theta, double a, double b, const std::vector<double>& xi);
std::vector<double> step_column(double c, const std::vector<double>& xi);

double column_distance(std::span<const double> xi, std::span<const double> F1, std::span<const double> F2);
// int |F1 - F2| dxi per (t,x); throws on grid mismatch.
std::vector<double> cdf_distance(const KineticField& F1, const KineticField& F2);

double column_spread(std::span<const double> xi, std::span<const double> F);
std::vector<double> spread(const KineticField& F);

struct InvariantReport {
    bool ok = true;
    bool bounds = true, monotone = true, endpoints = true;
    std::string message;
};

InvariantReport check_invariants(const KineticField& F);

}  // namespace oscillab
