#include "oscillab/exact_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <tbb/parallel_for.h>

namespace oscillab {

void TwoPhaseSpec::validate_lagrangian() const {
    if (!(a > 0.0 && 2.0 * a < b)) throw std::invalid_argument("two-phase spec: need 0 < a < 2a < b");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("two-phase spec: theta must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("two-phase spec: n must be >= 1");
}

void TwoPhaseSpec::validate_cns() const {
    const double s = std::pow(2.0, d);
    if (d < 1) throw std::invalid_argument("two-phase spec: d must be >= 1");
    if (!(a > 0.0 && a < b / s)) throw std::invalid_argument("two-phase spec: need 0 < a/2^d < a < b/2^d < b");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("two-phase spec: theta must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("two-phase spec: n must be >= 1");
}

namespace {

void check_window(double t) {
    if (t < 1.0 - 1e-14 || t > 2.0 + 1e-14)
        throw std::domain_error("exact family is only defined for t in [1,2]");
}

}  // namespace

LagrangianPoint lagrangian_two_phase(const TwoPhaseSpec& s, double t, double x) {
    check_window(t);
    const double k = std::floor(x);
    const double r = x - k;
    const double c = s.c_theta();
    double u, v;
    if (r < s.theta) {
        u = s.a * t;
        v = k * c + r * s.a;
    } else {
        u = s.b * t;
        v = k * c + s.theta * s.a + (r - s.theta) * s.b;
    }
    return {u, v, t * v};
}

LagrangianPoint lagrangian_rescaled(const TwoPhaseSpec& s, double t, double x) {
    const double n = s.n;
    LagrangianPoint p = lagrangian_two_phase(s, t, n * x);
    return {p.u, p.v / n, p.y / n};
}

EulerPoint eulerian_shear_1d(const TwoPhaseSpec& s, double t, double y) {
    check_window(t);
    const double v0 = s.c_theta();
    const double z = s.n * y / t;
    const double k = std::floor(z / v0);
    const double r = z - k * v0;
    const double rho = (r < s.a * s.theta) ? 1.0 / (t * s.a) : 1.0 / (t * s.b);
    return {rho, y / t};
}

EulerPoint cns_multid(const TwoPhaseSpec& s, double t, double r) {
    check_window(t);
    const double z = s.n * std::abs(r) / t;
    const double frac = z - std::floor(z);
    const double td = std::pow(t, s.d);
    const double rho = (frac < s.theta) ? s.a / td : s.b / td;
    return {rho, r / t};
}

bool euler1d_pressure_matched(const ConstitutiveLaw& p, const TwoPhaseSpec& s, double tol) {
    return matching_residual(p, MatchIdentity::Pressure, 1.0 / s.b, 1.0 / s.a, 1) <= tol;
}

bool multid_pressure_matched(const ConstitutiveLaw& p, const TwoPhaseSpec& s, double tol) {
    return matching_residual(p, MatchIdentity::Pressure, s.a, s.b, s.d) <= tol;
}

namespace {

void record(InterfaceResidual& r, double t, double mass, double flux) {
    if (std::abs(flux) > r.flux_jump || std::abs(mass) > r.mass_jump) r.t_worst = t;
    r.mass_jump = std::max(r.mass_jump, std::abs(mass));
    r.flux_jump = std::max(r.flux_jump, std::abs(flux));
}

}  // namespace

std::vector<InterfaceResidual> rh_residual_lagrangian(const TwoPhaseSpec& s, const ConstitutiveLaw& law,
                                                      LagrangianModel model, const std::vector<double>& t_grid) {
    InterfaceResidual at_k{"x=k", 0, 0, 0}, at_kt{"x=k+theta", 0, 0, 0};
    const double c = s.c_theta();
    const double k = 1.0;
    for (double t : t_grid) {
        check_window(t);
        // one-sided phase data: strain rate u_t/u is 1/t in both phases
        auto stress = [&](double phase_strain, double slope) {
            const double u = phase_strain * t;
            return model == LagrangianModel::Shear ? law(u) + slope : law(u) + slope / u;
        };
        const double Sa = stress(s.a, s.a), Sb = stress(s.b, s.b);
        // x = k + theta: phase a on the left, b on the right
        const double v_left = k * c + s.theta * s.a;
        const double v_right = k * c + s.theta * s.a + 0.0 * s.b;
        record(at_kt, t, v_right - v_left, Sb - Sa);
        // x = k: phase b on the left (end of cell k-1), a on the right
        const double vl = (k - 1.0) * c + s.theta * s.a + (1.0 - s.theta) * s.b;
        const double vr = k * c;
        record(at_k, t, vr - vl, Sa - Sb);
    }
    return {at_k, at_kt};
}

std::vector<InterfaceResidual> rh_residual_euler1d(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu,
                                                   const std::vector<double>& t_grid) {
    InterfaceResidual at_k{"y=k v0 t", 0, 0, 0}, at_kt{"y=(k v0 + a theta) t", 0, 0, 0};
    const double v0 = s.c_theta();
    const double k = 1.0;
    for (double t : t_grid) {
        check_window(t);
        const double ra = 1.0 / (t * s.a), rb = 1.0 / (t * s.b);
        const double uy = 1.0 / t;
        const double za = -p(ra) + mu * uy, zb = -p(rb) + mu * uy;
        for (int which = 0; which < 2; ++which) {
            const double cI = (k * v0 + (which ? s.a * s.theta : 0.0)) / s.n;
            const double yI = cI * t;
            const double speed = cI;
            const double u = yI / t;
            const double rl = which ? ra : rb, rr = which ? rb : ra;
            const double mass = rr * (u - speed) - rl * (u - speed);
            const double flux = which ? zb - za : za - zb;
            record(which ? at_kt : at_k, t, mass, flux);
        }
    }
    return {at_k, at_kt};
}

std::vector<InterfaceResidual> rh_residual_multid(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu,
                                                  double lambda, const std::vector<double>& t_grid) {
    InterfaceResidual at_k{"|y|=k t", 0, 0, 0}, at_kt{"|y|=(k+theta) t", 0, 0, 0};
    const double k = 1.0;
    for (double t : t_grid) {
        check_window(t);
        const double td = std::pow(t, s.d);
        const double ra = s.a / td, rb = s.b / td;
        const double divu = s.d / t;
        const double za = -p(ra) + (2.0 * mu + lambda) * divu;
        const double zb = -p(rb) + (2.0 * mu + lambda) * divu;
        for (int which = 0; which < 2; ++which) {
            const double cI = (k + (which ? s.theta : 0.0)) / s.n;
            const double rI = cI * t;
            const double ur = rI / t;
            const double rl = which ? ra : rb, rr = which ? rb : ra;
            const double mass = (rr - rl) * (ur - cI);
            const double flux = which ? zb - za : za - zb;
            record(which ? at_kt : at_k, t, mass, flux);
        }
    }
    return {at_k, at_kt};
}

double max_flux_jump(const std::vector<InterfaceResidual>& r) {
    double m = 0.0;
    for (const auto& e : r) m = std::max(m, e.flux_jump);
    return m;
}

double max_mass_jump(const std::vector<InterfaceResidual>& r) {
    double m = 0.0;
    for (const auto& e : r) m = std::max(m, e.mass_jump);
    return m;
}

WeakResult weak_residual(const WeakFamily& fam, const std::vector<TestFunction>& tests, int nt, int nx) {
    WeakResult res;
    res.per_test.assign(tests.size(), 0.0);
    const std::size_t neq = fam.equations.size();
    tbb::parallel_for(std::size_t(0), tests.size(), [&](std::size_t it) {
        const TestFunction& tf = tests[it];
        const double t0 = tf.bt.lo(), t1 = tf.bt.hi();
        const double x0 = tf.bx.lo(), x1 = tf.bx.hi();
        const double ht = (t1 - t0) / nt, hx = (x1 - x0) / nx;
        std::vector<double> acc(neq, 0.0);
        std::vector<double> cuts;
        for (int i = 0; i < nt; ++i) {
            const double t = t0 + (i + 0.5) * ht;
            const double pt = tf.bt.value(t), dpt = tf.bt.deriv(t);
            cuts.clear();
            if (fam.interfaces) fam.interfaces(t, x0, x1, cuts);
            std::sort(cuts.begin(), cuts.end());
            std::size_t ci = 0;
            std::vector<double> row(neq, 0.0);
            for (int j = 0; j < nx; ++j) {
                const double a = x0 + j * hx, b = (j + 1 == nx) ? x1 : x0 + (j + 1) * hx;
                double left = a;
                auto piece = [&](double l, double r) {
                    const double x = 0.5 * (l + r), w = r - l;
                    const double px = tf.bx.value(x), dpx = tf.bx.deriv(x);
                    const double phi = pt * px, phi_t = dpt * px, phi_x = pt * dpx;
                    for (std::size_t e = 0; e < neq; ++e) row[e] += w * fam.equations[e](t, x, phi, phi_t, phi_x);
                };
                while (ci < cuts.size() && cuts[ci] <= a) ++ci;
                while (ci < cuts.size() && cuts[ci] < b) {
                    if (cuts[ci] > left) piece(left, cuts[ci]);
                    left = cuts[ci];
                    ++ci;
                }
                piece(left, b);
            }
            for (std::size_t e = 0; e < neq; ++e) acc[e] += ht * row[e];
        }
        double worst = 0.0;
        for (double v : acc) worst = std::max(worst, std::abs(v));
        res.per_test[it] = worst;
    });
    for (double v : res.per_test) res.max_abs = std::max(res.max_abs, v);
    return res;
}

std::vector<TestFunction> test_catalogue(double x_lo, double x_hi) {
    std::vector<TestFunction> out;
    const double L = x_hi - x_lo;
    for (double tc : {1.3, 1.5, 1.7})
        for (int i = 0; i < 4; ++i) out.push_back({Bump{tc, 0.25}, Bump{x_lo + 0.2 * L * (i + 1), 0.15 * L}});
    return out;
}

namespace {

// Interfaces c/n * scale for c in {k, k + theta}-type offsets inside (lo, hi).
void periodic_cuts(double period, double offset, double lo, double hi, std::vector<double>& cuts) {
    const double k0 = std::floor((lo - offset) / period) - 1.0;
    for (double k = k0;; k += 1.0) {
        const double x = k * period + offset;
        if (x >= hi) break;
        if (x > lo) cuts.push_back(x);
    }
}

}  // namespace

WeakFamily lagrangian_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& law, LagrangianModel model) {
    WeakFamily fam;
    fam.equations.push_back([s](double t, double x, double, double phi_t, double phi_x) {
        const auto p = lagrangian_rescaled(s, t, x);
        return p.u * phi_t - p.v * phi_x;
    });
    fam.equations.push_back([s, &law, model](double t, double x, double, double phi_t, double phi_x) {
        const auto p = lagrangian_rescaled(s, t, x);
        const double vx = p.u / t;  // V_x is the phase strain a or b
        const double S = model == LagrangianModel::Shear ? law(p.u) + vx : law(p.u) + vx / p.u;
        return p.v * phi_t - S * phi_x;
    });
    fam.interfaces = [s](double, double lo, double hi, std::vector<double>& cuts) {
        const double per = 1.0 / s.n;
        periodic_cuts(per, 0.0, lo, hi, cuts);
        periodic_cuts(per, s.theta * per, lo, hi, cuts);
    };
    return fam;
}

WeakFamily euler1d_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu) {
    WeakFamily fam;
    fam.equations.push_back([s](double t, double y, double, double phi_t, double phi_y) {
        const auto e = eulerian_shear_1d(s, t, y);
        return e.rho * phi_t + e.rho * e.u * phi_y;
    });
    fam.equations.push_back([s, &p, mu](double t, double y, double, double phi_t, double phi_y) {
        const auto e = eulerian_shear_1d(s, t, y);
        const double flux = e.rho * e.u * e.u + p(e.rho) - mu / t;
        return e.rho * e.u * phi_t + flux * phi_y;
    });
    fam.interfaces = [s](double t, double lo, double hi, std::vector<double>& cuts) {
        const double per = t * s.c_theta() / s.n;
        periodic_cuts(per, 0.0, lo, hi, cuts);
        periodic_cuts(per, t * s.a * s.theta / s.n, lo, hi, cuts);
    };
    return fam;
}

WeakFamily multid_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu, double lambda) {
    WeakFamily fam;
    const int d = s.d;
    const double area = d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi);
    auto weight = [area, d](double r) { return area * std::pow(r, d - 1); };
    fam.equations.push_back([s, weight](double t, double r, double, double phi_t, double phi_r) {
        const auto e = cns_multid(s, t, r);
        return weight(r) * (e.rho * phi_t + e.rho * e.u * phi_r);
    });
    fam.equations.push_back([s, &p, mu, lambda, weight, d](double t, double r, double phi, double phi_t, double phi_r) {
        const auto e = cns_multid(s, t, r);
        const double visc = (2.0 * mu + lambda * d) / t;
        const double div_psi = phi_r + (d - 1) * phi / r;
        return weight(r) * (e.rho * e.u * phi_t + e.rho * e.u * e.u * phi_r + (p(e.rho) - visc) * div_psi);
    });
    fam.interfaces = [s](double t, double lo, double hi, std::vector<double>& cuts) {
        const double per = t / s.n;
        periodic_cuts(per, 0.0, lo, hi, cuts);
        periodic_cuts(per, s.theta * per, lo, hi, cuts);
    };
    return fam;
}

TwinningReport twinning_check(const TwinningSpec& spec, const ConstitutiveLaw& law, const std::vector<double>& t_grid,
                              int segment_samples) {
    const Eigen::Index d = spec.F0.rows();
    if (spec.F0.cols() != d || spec.a.size() != d || spec.b.size() != d || spec.nu.size() != d)
        throw std::invalid_argument("twinning: inconsistent dimensions");
    if (std::abs(spec.nu.norm() - 1.0) > 1e-12) throw std::invalid_argument("twinning: nu must be a unit vector");
    TwinningReport rep;
    const Eigen::MatrixXd Fm = spec.F0 + spec.a * spec.nu.transpose();
    const Eigen::VectorXd jump = spec.b - spec.a;
    const Eigen::MatrixXd J = jump * spec.nu.transpose();
    auto stress = [&](const Eigen::MatrixXd& F) { return F.unaryExpr([&](double f) { return law(f); }).eval(); };
    for (double t : t_grid) {
        const Eigen::VectorXd r = (stress(t * Fm + t * J) - stress(t * Fm) + J) * spec.nu;
        rep.condition_residual = std::max(rep.condition_residual, r.lpNorm<Eigen::Infinity>());
    }
    if (jump.norm() == 0.0) return rep;
    rep.roc_checked = true;
    const Eigen::VectorXd xi = jump.normalized();
    rep.roc_min_form = INFINITY;
    for (double t : t_grid) {
        for (double s : linspace(0.0, 1.0, segment_samples)) {
            const Eigen::MatrixXd G = t * Fm + s * t * J;
            double form = 0.0;
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index al = 0; al < d; ++al)
                    form += law.deriv(G(i, al)) * xi(i) * xi(i) * spec.nu(al) * spec.nu(al);
            if (form < rep.roc_min_form) {
                rep.roc_min_form = form;
                rep.roc_t = t;
                rep.roc_s = s;
            }
        }
    }
    rep.roc_violated = rep.roc_min_form < 0.0;
    return rep;
}

}  // namespace oscillab
