#include "oscillab/cns_kinetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <tbb/parallel_for.h>

namespace oscillab {

DensityKineticField::DensityKineticField(std::vector<double> t_, std::vector<double> y_, std::vector<double> xi_)
    : t(std::move(t_)), y(std::move(y_)), xi(std::move(xi_)) {
    H.assign(t.size() * y.size() * xi.size(), 0.0);
}

double two_phase_H_value(double theta, double rho1, double rho2, double xi) {
    return (rho1 < xi ? theta * rho1 : 0.0) + (rho2 < xi ? (1.0 - theta) * rho2 : 0.0);
}

std::vector<double> two_phase_H(double theta, double rho1, double rho2, const std::vector<double>& xi) {
    if (!(rho1 > 0.0 && rho1 <= rho2)) throw std::invalid_argument("two_phase_H: need 0 < rho1 <= rho2");
    if (rho1 < xi.front() || rho2 >= xi.back()) throw std::invalid_argument("two_phase_H: support outside the xi grid");
    std::vector<double> H(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) H[k] = two_phase_H_value(theta, rho1, rho2, xi[k]);
    return H;
}

DensityInvariantReport check_invariants(const DensityKineticField& F, const std::vector<double>& expected_mass,
                                        double tol) {
    DensityInvariantReport r;
    std::ostringstream msg;
    if (F.H.size() != F.nt() * F.ny() * F.nxi()) return {false, "field size does not match its grids"};
    if (!expected_mass.empty() && expected_mass.size() != F.nt() * F.ny())
        return {false, "expected mass has the wrong size"};
    for (std::size_t it = 0; it < F.nt(); ++it)
        for (std::size_t iy = 0; iy < F.ny(); ++iy) {
            auto c = F.column(it, iy);
            bool bad = false;
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (!(c[k] >= 0.0)) bad = true;
                if (k > 0 && c[k] < c[k - 1]) bad = true;
            }
            if (c.front() != 0.0) bad = true;
            if (!expected_mass.empty()) {
                const double m = expected_mass[it * F.ny() + iy];
                if (std::abs(c.back() - m) > tol * std::max(1.0, std::abs(m))) bad = true;
            }
            if (bad && r.ok) {
                r.ok = false;
                msg << "invariant breach at t=" << F.t[it] << " y=" << F.y[iy];
            }
        }
    r.message = r.ok ? "ok" : msg.str();
    return r;
}

DensityKineticField solve_H_transport_1d(const HTransportProblem& prob) {
    if (!prob.pressure || !prob.u || !prob.u_y || !prob.p_bar || !prob.H0)
        throw std::invalid_argument("H transport: incomplete problem");
    if (!(prob.lam2mu > 0.0)) throw std::invalid_argument("H transport: lambda + 2 mu must be positive");
    namespace ode = boost::numeric::odeint;
    using state = std::array<double, 3>;  // y, xi, int u_y
    DensityKineticField out(prob.output_times, prob.y, prob.xi);
    out.lam2mu = prob.lam2mu;
    const ConstitutiveLaw& p = *prob.pressure;
    const std::size_t ny = prob.y.size(), nxi = prob.xi.size();
    double xi_abs = 0.0;
    for (double z : prob.xi) xi_abs = std::max(xi_abs, std::abs(z));
    // backward characteristics can blow up; H0 is flat that far out
    const double cap = prob.xi_cap > 0.0 ? prob.xi_cap : 1e3 * std::max(xi_abs, 1.0);
    for (std::size_t it = 0; it < prob.output_times.size(); ++it) {
        const double t = prob.output_times[it];
        if (t < prob.t0 - 1e-14) throw std::invalid_argument("H transport: output before the initial time");
        // y-foot and weight depend on the path only, shared by every xi of a column
        std::vector<std::array<double, 2>> foot(ny);
        tbb::parallel_for(std::size_t(0), ny, [&](std::size_t iy) {
            std::array<double, 2> z{prob.y[iy], 0.0};
            if (t > prob.t0) {
                auto rhs = [&](const std::array<double, 2>& s, std::array<double, 2>& d, double tau) {
                    d[0] = prob.u(tau, s[0]);
                    d[1] = prob.u_y(tau, s[0]);
                };
                auto stepper =
                    ode::make_dense_output(prob.abs_tol, prob.rel_tol, ode::runge_kutta_dopri5<std::array<double, 2>>());
                ode::integrate_adaptive(stepper, rhs, z, t, prob.t0, (prob.t0 - t) / 8.0);
            }
            foot[iy] = z;
        });
        tbb::parallel_for(std::size_t(0), ny * nxi, [&](std::size_t idx) {
            const std::size_t iy = idx / nxi, k = idx % nxi;
            state x{prob.y[iy], prob.xi[k], 0.0};
            if (t > prob.t0) {
                auto rhs = [&](const state& s, state& d, double tau) {
                    const double uy = prob.u_y(tau, s[0]);
                    d[0] = prob.u(tau, s[0]);
                    d[1] = std::abs(s[1]) >= cap ? 0.0 : -s[1] * ((p(s[1]) - prob.p_bar(tau, s[0])) / prob.lam2mu + uy);
                    d[2] = uy;
                };
                auto stepper = ode::make_dense_output(prob.abs_tol, prob.rel_tol, ode::runge_kutta_dopri5<state>());
                ode::integrate_adaptive(stepper, rhs, x, t, prob.t0, (prob.t0 - t) / 8.0);
            }
            // foot[iy][1] accumulated int_t^{t0} u_y = -int_{t0}^t u_y
            const double h = std::exp(foot[iy][1]) * prob.H0(foot[iy][0], x[1]);
            if (!(h >= 0.0) || !std::isfinite(h)) throw std::runtime_error("H transport: negative or non-finite H");
            out.column(it, iy)[k] = h;
        });
    }
    return out;
}

double continuity_residual(const DensityKineticField& H, const std::function<double(double, double)>& u) {
    double worst = 0.0, scale = 0.0;
    for (std::size_t it = 0; it < H.nt(); ++it)
        for (std::size_t iy = 0; iy < H.ny(); ++iy) scale = std::max(scale, std::abs(H.rho_bar(it, iy)));
    for (std::size_t it = 1; it + 1 < H.nt(); ++it)
        for (std::size_t iy = 1; iy + 1 < H.ny(); ++iy) {
            const double rt = (H.rho_bar(it + 1, iy) - H.rho_bar(it - 1, iy)) / (H.t[it + 1] - H.t[it - 1]);
            const double fr = u(H.t[it], H.y[iy + 1]) * H.rho_bar(it, iy + 1);
            const double fl = u(H.t[it], H.y[iy - 1]) * H.rho_bar(it, iy - 1);
            const double ry = (fr - fl) / (H.y[iy + 1] - H.y[iy - 1]);
            worst = std::max(worst, std::abs(rt + ry));
        }
    return scale > 0.0 ? worst / scale : worst;
}

double XiWeight::value(double xi) const {
    const double s = (xi - c) / r;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q;
}

double XiWeight::antiderivative(double xi) const {
    const double s = std::clamp((xi - c) / r, -1.0, 1.0);
    const double s3 = s * s * s;
    return r * (s - 2.0 * s3 / 3.0 + s3 * s * s / 5.0 + 8.0 / 15.0);
}

std::vector<XiWeight> xi_weight_catalogue(const TwoPhaseSpec& s) {
    const double lo = 0.5 * s.a / std::pow(2.0, s.d), hi = 1.2 * s.b;
    const double L = hi - lo;
    std::vector<XiWeight> out;
    for (int k = 0; k < 4; ++k) out.push_back({lo + (k + 0.5) * L / 4.0, 0.3 * L});
    return out;
}

std::vector<TestFunction> renorm_test_catalogue() {
    return {{Bump{1.5, 0.4}, Bump{0.4, 0.3}}, {Bump{1.5, 0.4}, Bump{0.6, 0.3}}};
}

RenormReport renormalized_residual(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double lam2mu, int nt, int nr,
                                   std::vector<XiWeight> weights) {
    s.validate_cns();
    if (!(lam2mu > 0.0)) throw std::invalid_argument("renormalized_residual: lambda + 2 mu must be positive");
    if (weights.empty()) weights = xi_weight_catalogue(s);
    const int d = s.d;
    const double area = d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi);
    auto wr = [area, d](double r) { return area * std::pow(r, d - 1); };
    const auto tests = renorm_test_catalogue();
    WeakFamily shells = multid_weak_family(s, p, 0.0, 0.0);  // borrowed for its interfaces

    RenormReport rep;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const XiWeight th = weights[k];
        WeakFamily fa;
        fa.interfaces = shells.interfaces;
        fa.equations.push_back([s, th, wr, d](double t, double r, double phi, double phi_t, double phi_r) {
            const auto e = cns_multid(s, t, r);
            const double B = th.antiderivative(e.rho);
            const double Q = e.rho * th.value(e.rho) - B;
            return wr(r) * (B * phi_t + B * e.u * phi_r - Q * (d / t) * phi);
        });
        WeakFamily fl;
        fl.equations.push_back([s, th, wr, d, &p, lam2mu](double t, double r, double phi, double phi_t, double phi_r) {
            const double td = std::pow(t, d);
            const double r1 = s.a / td, r2 = s.b / td;
            const double w1 = s.theta, w2 = 1.0 - s.theta;
            const double B1 = th.antiderivative(r1), B2 = th.antiderivative(r2);
            const double Q1 = r1 * th.value(r1) - B1, Q2 = r2 * th.value(r2) - B2;
            const double p1 = p(r1), p2 = p(r2);
            const double pbar = w1 * p1 + w2 * p2;
            const double bbar = w1 * B1 + w2 * B2, qbar = w1 * Q1 + w2 * Q2;
            const double defect = (w1 * Q1 * (pbar - p1) + w2 * Q2 * (pbar - p2)) / lam2mu;
            return wr(r) * (bbar * phi_t + bbar * (r / t) * phi_r - qbar * (d / t) * phi + defect * phi);
        });
        const auto ra = weak_residual(fa, tests, nt, nr);
        const auto rl = weak_residual(fl, tests, nt, nr);
        for (std::size_t i = 0; i < tests.size(); ++i) {
            rep.pairings.push_back({i, k, ra.per_test[i], rl.per_test[i]});
            rep.max_approx = std::max(rep.max_approx, ra.per_test[i]);
            rep.max_limit = std::max(rep.max_limit, rl.per_test[i]);
        }
    }
    return rep;
}

}  // namespace oscillab
