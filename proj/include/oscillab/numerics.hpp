// Small numerical kernels shared by the solvers.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oscillab {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Monotone (Fritsch-Carlson, harmonic-mean) node slopes for strictly increasing x.
std::vector<double> pchip_slopes(std::span<const double> x, std::span<const double> y);

// Cubic Hermite on [x0, x0+h] with end values/slopes.
struct HermiteSeg {
    double x0, h, y0, y1, d0, d1;
    double value(double x) const;
    double deriv(double x) const;
    // integral from x0 to x
    double integral_to(double x) const;
};

// Solves a tridiagonal system in place (Thomas). lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double>& rhs);

// Periodic (cyclic) tridiagonal solve via Sherman-Morrison.
void solve_periodic_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                                const std::vector<double>& upper, std::vector<double>& rhs);

// C-infinity bump supported on (c-r, c+r), peak 1 at c.
struct Bump {
    double c = 0.0, r = 1.0;
    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
    double lo() const { return c - r; }
    double hi() const { return c + r; }
};

// Integrates dy/dt = f(y) from t0 to t1 (t1 may be < t0) with adaptive Dormand-Prince 5(4).
double integrate_scalar_ode(const std::function<double(double)>& f, double y0, double t0,
                            double t1, double abs_tol = 1e-12, double rel_tol = 1e-10);

// All roots of g on [lo, hi] found by sign-change scan of `samples` points + bracketing refinement.
std::vector<double> find_roots(const std::function<double(double)>& g, double lo, double hi,
                               std::size_t samples = 4000, double tol = 1e-14);

// Gauss-Legendre rule with `order` points mapped to [a, b].
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order = 20);

// Least squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace oscillab
