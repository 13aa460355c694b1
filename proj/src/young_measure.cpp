#include "oscillab/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "oscillab/numerics.hpp"

namespace oscillab {

KineticField::KineticField(std::vector<double> t_, std::vector<double> x_, std::vector<double> xi_)
    : t(std::move(t_)), x(std::move(x_)), xi(std::move(xi_)) {
    F.assign(t.size() * x.size() * xi.size(), 0.0);
}

std::vector<double> default_xi_grid(double lo, double hi, std::size_t nodes, double pad) {
    double L = hi - lo;
    if (!(L > 0.0)) {
        L = 1.0;
        const double c = 0.5 * (lo + hi);
        lo = c - 0.5;
        hi = c + 0.5;
    }
    return linspace(lo - pad * L, hi + pad * L, nodes);
}

KineticField empirical_cdf_field(const std::vector<double>& times, const std::vector<double>& x_cells,
                                 const std::vector<std::vector<double>>& u, double w, const std::vector<double>& xi,
                                 const std::vector<double>& x_out, bool periodic) {
    if (u.size() != times.size()) throw std::invalid_argument("empirical_cdf_field: one snapshot per time required");
    if (x_cells.size() < 2) throw std::invalid_argument("empirical_cdf_field: need at least two cells");
    if (!(w > 0.0)) throw std::invalid_argument("empirical_cdf_field: window must be positive");
    const std::size_t N = x_cells.size();
    const double dx = x_cells[1] - x_cells[0];
    const double dom_lo = x_cells.front() - 0.5 * dx, dom_hi = x_cells.back() + 0.5 * dx;
    const std::vector<double> xs = x_out.empty() ? x_cells : x_out;
    KineticField K(times, xs, xi);
    K.provenance = "empirical";
    K.window = w;
    const double L = dom_hi - dom_lo;
    if (periodic && 2.0 * w >= L) throw std::invalid_argument("empirical_cdf_field: periodic window wider than the domain");
    if (!periodic)
        for (double xc : xs)
            if (xc - w < dom_lo - 1e-12 || xc + w > dom_hi + 1e-12) K.window_clipped = true;
    const double slack = 1e-9 * dx;
    for (const auto& row : u)
        if (row.size() != N) throw std::invalid_argument("empirical_cdf_field: snapshot size mismatch");
    tbb::parallel_for(std::size_t(0), times.size() * xs.size(), [&](std::size_t idx) {
        const std::size_t it = idx / xs.size(), ic = idx % xs.size();
        const double xc = xs[ic];
        std::vector<double> vals;
        for (std::size_t j = 0; j < N; ++j) {
            double dist = std::abs(x_cells[j] - xc);
            if (periodic) dist = std::min(dist, L - dist);
            if (dist <= w + slack) vals.push_back(u[it][j]);
        }
        std::sort(vals.begin(), vals.end());
        auto col = K.column(it, ic);
        std::size_t c = 0;
        const double m = static_cast<double>(vals.size());
        for (std::size_t k = 0; k < xi.size(); ++k) {
            while (c < vals.size() && vals[c] <= xi[k]) ++c;
            col[k] = c / m;
        }
    });
    return K;
}

Integrand Integrand::one() {
    return {[](double) { return 1.0; }, [](double x) { return x; }};
}

Integrand Integrand::identity() {
    return {[](double x) { return x; }, [](double x) { return 0.5 * x * x; }};
}

Integrand Integrand::power(int k) {
    if (k < 0) throw std::invalid_argument("Integrand::power: negative exponent");
    return {[k](double x) { return std::pow(x, k); }, [k](double x) { return std::pow(x, k + 1) / (k + 1); }};
}

Integrand Integrand::stress(const ConstitutiveLaw& law) {
    return {[&law](double x) { return law(x); }, [&law](double x) { return law.energy(x); }};
}

Integrand Integrand::relaxation(const ConstitutiveLaw& law, double S) {
    return {[&law, S](double x) { return law.deriv(x) * (S - law(x)); },
            [&law, S](double x) {
                const double s = law(x);
                return S * s - 0.5 * s * s;
            }};
}

namespace {

double piece_integral(const Integrand& g, double l, double r) {
    if (g.antiderivative) return g.antiderivative(r) - g.antiderivative(l);
    return gauss_integrate(g.f, l, r, 7);
}

// int_l^r f' F for F linear with F(l)=Fl, F(r)=Fr.
double fprime_F(const Integrand& g, double l, double r, double Fl, double Fr) {
    if (r <= l) return 0.0;
    const double s = (Fr - Fl) / (r - l);
    return g.f(r) * Fr - g.f(l) * Fl - s * piece_integral(g, l, r);
}

}  // namespace

double column_moment(std::span<const double> xi, std::span<const double> F, const Integrand& g) {
    const std::size_t n = xi.size();
    double m = F[0] * g.f(xi[0]) + (1.0 - F[n - 1]) * g.f(xi[n - 1]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dF = F[k + 1] - F[k];
        if (dF != 0.0) m += dF / (xi[k + 1] - xi[k]) * piece_integral(g, xi[k], xi[k + 1]);
    }
    return m;
}

double column_moment_anchored(std::span<const double> xi, std::span<const double> F, const Integrand& g,
                              double anchor) {
    const std::size_t n = xi.size();
    double m = g.f(anchor);
    if (anchor < xi[0]) m += g.f(xi[0]) - g.f(anchor);
    if (anchor > xi[n - 1]) m -= g.f(anchor) - g.f(xi[n - 1]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double l = xi[k], r = xi[k + 1];
        const double s = (F[k + 1] - F[k]) / (r - l);
        auto Fat = [&](double z) { return F[k] + s * (z - l); };
        if (r <= anchor) {
            m -= fprime_F(g, l, r, F[k], F[k + 1]);
        } else if (l >= anchor) {
            m += g.f(r) - g.f(l) - fprime_F(g, l, r, F[k], F[k + 1]);
        } else {
            const double Fa = Fat(anchor);
            m -= fprime_F(g, l, anchor, F[k], Fa);
            m += g.f(r) - g.f(anchor) - fprime_F(g, anchor, r, Fa, F[k + 1]);
        }
    }
    return m;
}

std::vector<double> moment(const KineticField& K, const Integrand& g) {
    std::vector<double> out(K.nt() * K.nx());
    tbb::parallel_for(std::size_t(0), out.size(), [&](std::size_t idx) {
        out[idx] = column_moment(K.xi, K.column(idx / K.nx(), idx % K.nx()), g);
    });
    return out;
}

std::vector<double> two_point_column(double theta, double a, double b, const std::vector<double>& xi) {
    if (a > b) throw std::invalid_argument("two_point_column: need a <= b");
    if (a < xi.front() || b >= xi.back()) throw std::invalid_argument("two_point_column: support outside the xi grid");
    std::vector<double> F(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F[k] = xi[k] < a ? 0.0 : (xi[k] < b ? theta : 1.0);
    return F;
}

KineticField two_point_cdf(double theta, double a, double b, const std::vector<double>& xi) {
    KineticField K({0.0}, {0.0}, xi);
    K.F = two_point_column(theta, a, b, xi);
    return K;
}

std::vector<double> step_column(double c, const std::vector<double>& xi) {
    std::vector<double> F(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F[k] = xi[k] < c ? 0.0 : 1.0;
    return F;
}

double column_distance(std::span<const double> xi, std::span<const double> F1, std::span<const double> F2) {
    double d = 0.0;
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        const double h = xi[k + 1] - xi[k];
        const double d0 = F1[k] - F2[k], d1 = F1[k + 1] - F2[k + 1];
        if (d0 * d1 >= 0.0)
            d += 0.5 * h * (std::abs(d0) + std::abs(d1));
        else
            d += 0.5 * h * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
    return d;
}

std::vector<double> cdf_distance(const KineticField& A, const KineticField& B) {
    if (A.xi != B.xi || A.nt() != B.nt() || A.nx() != B.nx())
        throw std::invalid_argument("cdf_distance: grid mismatch");
    std::vector<double> out(A.nt() * A.nx());
    for (std::size_t idx = 0; idx < out.size(); ++idx)
        out[idx] = column_distance(A.xi, A.column(idx / A.nx(), idx % A.nx()), B.column(idx / A.nx(), idx % A.nx()));
    return out;
}

double column_spread(std::span<const double> xi, std::span<const double> F) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        // trapezoid on nodal values: an atom (F in {0,1} at every node) gives exactly 0
        const double h = xi[k + 1] - xi[k], a = F[k], b = F[k + 1];
        s += 0.5 * h * (a * (1.0 - a) + b * (1.0 - b));
    }
    return s;
}

std::vector<double> spread(const KineticField& K) {
    std::vector<double> out(K.nt() * K.nx());
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] = column_spread(K.xi, K.column(idx / K.nx(), idx % K.nx()));
    return out;
}

InvariantReport check_invariants(const KineticField& K) {
    InvariantReport r;
    std::ostringstream msg;
    if (K.F.size() != K.nt() * K.nx() * K.nxi()) {
        r.ok = false;
        r.message = "field size does not match its grids";
        return r;
    }
    for (std::size_t it = 0; it < K.nt(); ++it)
        for (std::size_t ix = 0; ix < K.nx(); ++ix) {
            auto c = K.column(it, ix);
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (!(c[k] >= 0.0 && c[k] <= 1.0) && r.bounds) {
                    r.bounds = false;
                    msg << "F outside [0,1] at t=" << K.t[it] << " x=" << K.x[ix] << "; ";
                }
                if (k > 0 && c[k] < c[k - 1] && r.monotone) {
                    r.monotone = false;
                    msg << "F decreasing at t=" << K.t[it] << " x=" << K.x[ix] << "; ";
                }
            }
            if ((c.front() != 0.0 || c.back() != 1.0) && r.endpoints) {
                r.endpoints = false;
                msg << "endpoint values not 0/1 at t=" << K.t[it] << " x=" << K.x[ix] << "; ";
            }
        }
    r.ok = r.bounds && r.monotone && r.endpoints;
    r.message = r.ok ? "ok" : msg.str();
    return r;
}

}  // namespace oscillab
