#include "oscillab/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace oscillab {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + h * static_cast<double>(i);
    out.back() = hi;
    return out;
}

namespace {

double three_point_end(double h0, double h1, double m0, double m1) {
    // non-centered, shape-preserving end slope
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(m0) || m0 == 0.0) {
        d = 0.0;
    } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > std::abs(3.0 * m0)) {
        d = 3.0 * m0;
    }
    return d;
}

}  // namespace

std::vector<double> pchip_slopes(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("pchip_slopes: need matching sizes >= 2");
    std::vector<double> h(n - 1), m(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        if (!(h[i] > 0.0)) throw std::invalid_argument("pchip_slopes: abscissae not increasing");
        m[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = m[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (m[i - 1] * m[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
        }
    }
    d[0] = three_point_end(h[0], h[1], m[0], m[1]);
    d[n - 1] = three_point_end(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
    return d;
}

double HermiteSeg::value(double x) const {
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

double HermiteSeg::deriv(double x) const {
    const double s = (x - x0) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * y1 +
            (3 * s2 - 2 * s) * h * d1) /
           h;
}

double HermiteSeg::integral_to(double x) const {
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double i00 = s - s3 + 0.5 * s4;
    const double i10 = 0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4;
    const double i01 = s3 - 0.5 * s4;
    const double i11 = -s3 / 3.0 + 0.25 * s4;
    return h * (i00 * y0 + i10 * h * d0 + i01 * y1 + i11 * h * d1);
}

void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

void solve_periodic_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                                const std::vector<double>& upper, std::vector<double>& rhs) {
    // A = T + u v^T with corners folded into u, v
    const std::size_t n = diag.size();
    const double alpha = upper[n - 1];  // A(n-1, 0)
    const double beta = lower[0];       // A(0, n-1)
    const double gamma = -diag[0];
    std::vector<double> d(diag);
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    std::vector<double> x(rhs);
    solve_tridiagonal(lower, d, upper, x);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiagonal(lower, d, upper, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] - fact * u[i];
}

double Bump::value(double x) const {
    const double s = (x - c) / r;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Bump::deriv(double x) const {
    const double s = (x - c) / r;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return value(x) * (-2.0 * s / (q * q)) / r;
}

double Bump::deriv2(double x) const {
    const double s = (x - c) / r;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    const double g = -2.0 * s / (q * q);
    const double gp = (-2.0 * q * q - (-2.0 * s) * 2.0 * q * (-2.0 * s)) / (q * q * q * q);
    return value(x) * (g * g + gp) / (r * r);
}

double integrate_scalar_ode(const std::function<double(double)>& f, double y0, double t0,
                            double t1, double abs_tol, double rel_tol) {
    namespace ode = boost::numeric::odeint;
    if (t0 == t1) return y0;
    using state = double;
    auto stepper = ode::make_dense_output(abs_tol, rel_tol, ode::runge_kutta_dopri5<state>());
    state y = y0;
    const double dt0 = (t1 - t0) / 4.0;
    ode::integrate_adaptive(
        stepper, [&](const state& s, state& dsdt, double) { dsdt = f(s); }, y, t0, t1, dt0);
    return y;
}

std::vector<double> find_roots(const std::function<double(double)>& g, double lo, double hi,
                               std::size_t samples, double tol) {
    std::vector<double> roots;
    const auto xs = linspace(lo, hi, samples + 1);
    double prev = g(xs[0]);
    if (prev == 0.0) roots.push_back(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double cur = g(xs[i]);
        if (cur == 0.0) {
            roots.push_back(xs[i]);
        } else if (prev != 0.0 && std::signbit(prev) != std::signbit(cur)) {
            std::uintmax_t iters = 200;
            auto term = [tol](double a, double b) { return std::abs(b - a) <= tol; };
            const auto br = boost::math::tools::toms748_solve(g, xs[i - 1], xs[i], prev, cur, term, iters);
            roots.push_back(0.5 * (br.first + br.second));
        }
        prev = cur;
    }
    return roots;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order) {
    if (a == b) return 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double s) { return f(mid + half * s); };
    double val = 0.0;
    switch (order) {
        case 7: val = boost::math::quadrature::gauss<double, 7>::integrate(g, -1.0, 1.0); break;
        case 10: val = boost::math::quadrature::gauss<double, 10>::integrate(g, -1.0, 1.0); break;
        case 30: val = boost::math::quadrature::gauss<double, 30>::integrate(g, -1.0, 1.0); break;
        default: val = boost::math::quadrature::gauss<double, 20>::integrate(g, -1.0, 1.0); break;
    }
    return half * val;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace oscillab
