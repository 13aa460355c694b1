#include "oscillab/effective_kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "oscillab/numerics.hpp"

namespace oscillab {

std::string to_string(EffectiveForm f) { return f == EffectiveForm::Velocity ? "velocity" : "stress"; }

EffectiveForm effective_form_from_string(const std::string& s) {
    if (s == "velocity") return EffectiveForm::Velocity;
    if (s == "stress") return EffectiveForm::Stress;
    throw std::invalid_argument("unknown effective form '" + s + "' (expected velocity or stress)");
}

namespace {

// Piecewise cubic monotone read of a column; F extended by its end values.
double interp_column(std::span<const double> xi, std::span<const double> F, const std::vector<double>& d, double z) {
    const std::size_t n = xi.size();
    if (z <= xi[0]) return F[0];
    if (z >= xi[n - 1]) return F[n - 1];
    const double h = xi[1] - xi[0];
    std::size_t k = std::min(n - 2, static_cast<std::size_t>((z - xi[0]) / h));
    while (k > 0 && z < xi[k]) --k;
    while (k + 2 < n && z >= xi[k + 1]) ++k;
    const HermiteSeg seg{xi[k], xi[k + 1] - xi[k], F[k], F[k + 1], d[k], d[k + 1]};
    const double lo = std::min(F[k], F[k + 1]), hi = std::max(F[k], F[k + 1]);
    return std::clamp(seg.value(z), lo, hi);
}

double linear_read(const std::vector<double>& xi, const std::vector<double>& F, double z) {
    if (z <= xi.front()) return F.front();
    if (z >= xi.back()) return F.back();
    const auto it = std::upper_bound(xi.begin(), xi.end(), z);
    const std::size_t k = static_cast<std::size_t>(it - xi.begin()) - 1;
    const double s = (z - xi[k]) / (xi[k + 1] - xi[k]);
    return F[k] + s * (F[k + 1] - F[k]);
}

}  // namespace

void transport_column(std::span<const double> xi, std::span<double> F, const ConstitutiveLaw& law, double S, double dt,
                      double abs_tol, double rel_tol) {
    const std::size_t n = xi.size();
    const double lo = xi[0], hi = xi[n - 1];
    const double pad = hi - lo;
    std::vector<double> old(F.begin(), F.end());
    const auto d = pchip_slopes(xi, old);
    double gmax = 0.0;
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        g[k] = S - law(xi[k]);
        gmax = std::max(gmax, std::abs(g[k]));
    }
    const double h = xi[1] - xi[0];
    // nodes whose reachable neighbourhood carries constant F keep their value
    const std::size_t reach = static_cast<std::size_t>(std::ceil(1.5 * dt * gmax / h)) + 2;
    std::vector<std::size_t> change(n + 1, 0);  // prefix count of value changes
    for (std::size_t k = 1; k < n; ++k) change[k] = change[k - 1] + (old[k] != old[k - 1] ? 1 : 0);
    change[n] = change[n - 1];
    auto rhs = [&](double y) { return (y < lo - pad || y > hi + pad) ? 0.0 : S - law(y); };
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = k > reach ? k - reach : 0;
        const std::size_t b = std::min(n - 1, k + reach);
        if (change[b] == change[a]) continue;
        if (g[k] == 0.0) continue;
        const double foot = integrate_scalar_ode(rhs, xi[k], 0.0, -dt, abs_tol, rel_tol);
        F[k] = interp_column(xi, old, d, foot);
    }
    if (F[0] != 0.0 || F[n - 1] != 1.0)
        throw std::runtime_error("effective transport: characteristic carried mass across the xi-grid boundary");
}

EffectiveTrajectory solve_effective(const KineticField& F0, const std::function<double(double)>& v0,
                                    const ConstitutiveLaw& law, double T, const std::vector<double>& output_times,
                                    const EffectiveOptions& opt) {
    const std::size_t N = F0.nx();
    const std::size_t M = F0.nxi();
    if (N < 2 || M < 3) throw std::invalid_argument("solve_effective: need at least 2 cells and 3 xi nodes");
    if (!(opt.dt > 0.0) || !(opt.mu > 0.0)) throw std::invalid_argument("solve_effective: dt and mu must be positive");
    const auto rep = check_invariants(F0);
    if (!rep.ok) throw std::invalid_argument("solve_effective: initial field invalid: " + rep.message);

    const double dx = 1.0 / N;
    const double mu = opt.mu;
    const auto& xi = F0.xi;
    std::vector<std::vector<double>> cols(N);
    for (std::size_t j = 0; j < N; ++j) {
        auto c = F0.column(0, j);
        cols[j].assign(c.begin(), c.end());
    }
    std::vector<double> v(N + 1), S(N), sbar(N), ubar(N);
    for (std::size_t i = 0; i <= N; ++i) v[i] = v0(i * dx);

    const Integrand sig = Integrand::stress(law);
    const Integrand id = Integrand::identity();
    const Integrand dsig{[&law](double x) { return law.deriv(x); }, [&law](double x) { return law(x); }};
    const Integrand sdsig{[&law](double x) { return law(x) * law.deriv(x); },
                          [&law](double x) { return 0.5 * law(x) * law(x); }};

    auto refresh_moments = [&]() {
        tbb::parallel_for(std::size_t(0), N, [&](std::size_t j) {
            sbar[j] = column_moment(xi, cols[j], sig);
            ubar[j] = column_moment(xi, cols[j], id);
        });
    };
    refresh_moments();
    for (std::size_t j = 0; j < N; ++j) S[j] = sbar[j] + mu * (v[j + 1] - v[j]) / dx;

    EffectiveTrajectory tr;
    std::vector<double> out_t;
    std::vector<std::vector<std::vector<double>>> snaps;
    double t = 0.0;
    std::size_t next = 0;
    auto emit = [&]() {
        out_t.push_back(t);
        snaps.push_back(cols);
        tr.v.push_back(v);
        tr.S.push_back(S);
        tr.u_bar.push_back(ubar);
        tr.sigma_bar.push_back(sbar);
        for (const auto& c : cols)
            tr.max_mass_defect = std::max(tr.max_mass_defect, std::abs(column_moment(xi, c, Integrand::one()) - 1.0));
    };
    while (next < output_times.size() && output_times[next] <= t + 1e-14) {
        emit();
        ++next;
    }

    auto transport = [&](double dt) {
        tbb::parallel_for(std::size_t(0), N, [&](std::size_t j) {
            transport_column(xi, cols[j], law, S[j], dt, opt.ode_abs_tol, opt.ode_rel_tol);
        });
    };

    std::vector<double> lower, diag, upper, rhs;
    auto macro = [&](double dt) {
        refresh_moments();
        if (opt.form == EffectiveForm::Velocity) {
            const double c = 0.5 * dt * mu / dx;
            lower.assign(N + 1, 0.0);
            diag.assign(N + 1, 0.0);
            upper.assign(N + 1, 0.0);
            rhs.assign(N + 1, 0.0);
            for (std::size_t i = 0; i <= N; ++i) {
                const double w = (i == 0 || i == N) ? 0.5 * dx : dx;
                const double sr = i < N ? sbar[i] : 0.0;
                const double sl = i > 0 ? sbar[i - 1] : 0.0;
                double lap = 0.0;  // (v_{i+1} - v_i) + (v_{i-1} - v_i) over existing neighbours
                if (i < N) lap += v[i + 1] - v[i];
                if (i > 0) lap += v[i - 1] - v[i];
                const double nb = (i < N ? 1.0 : 0.0) + (i > 0 ? 1.0 : 0.0);
                diag[i] = w + c * nb;
                lower[i] = i > 0 ? -c : 0.0;
                upper[i] = i < N ? -c : 0.0;
                rhs[i] = w * v[i] + c * lap + dt * (sr - sl);
            }
            solve_tridiagonal(lower, diag, upper, rhs);
            v = rhs;
            for (std::size_t j = 0; j < N; ++j) S[j] = sbar[j] + mu * (v[j + 1] - v[j]) / dx;
        } else {
            std::vector<double> m1(N), m2(N);
            tbb::parallel_for(std::size_t(0), N, [&](std::size_t j) {
                m1[j] = column_moment(xi, cols[j], dsig);
                m2[j] = column_moment(xi, cols[j], sdsig);
            });
            const double c = 0.5 * dt * mu / (dx * dx);
            lower.assign(N, -c);
            upper.assign(N, -c);
            diag.assign(N, 0.0);
            rhs.assign(N, 0.0);
            for (std::size_t j = 0; j < N; ++j) {
                // Dirichlet S = 0 at both ends through odd ghost values
                const double Sl = j > 0 ? S[j - 1] : -S[0];
                const double Sr = j + 1 < N ? S[j + 1] : -S[N - 1];
                const double extra = (j == 0 ? 1.0 : 0.0) + (j + 1 == N ? 1.0 : 0.0);
                diag[j] = 1.0 + c * (2.0 + extra) - 0.5 * dt * m1[j];
                rhs[j] = S[j] + c * (Sl - 2.0 * S[j] + Sr) + 0.5 * dt * m1[j] * S[j] - dt * m2[j];
            }
            lower[0] = 0.0;
            upper[N - 1] = 0.0;
            std::vector<double> Sold = S;
            solve_tridiagonal(lower, diag, upper, rhs);
            S = rhs;
            for (std::size_t i = 0; i <= N; ++i) {
                const double w = (i == 0 || i == N) ? 0.5 * dx : dx;
                const double sr = i < N ? 0.5 * (S[i] + Sold[i]) : 0.0;
                const double sl = i > 0 ? 0.5 * (S[i - 1] + Sold[i - 1]) : 0.0;
                v[i] += dt * (sr - sl) / w;
            }
        }
    };

    while (t < T - 1e-14) {
        double target = T;
        if (next < output_times.size()) target = std::min(target, output_times[next]);
        const double dt = std::min(opt.dt, target - t);
        if (opt.strang) {
            transport(0.5 * dt);
            macro(dt);
            transport(0.5 * dt);
            refresh_moments();
            if (opt.form == EffectiveForm::Velocity)
                for (std::size_t j = 0; j < N; ++j) S[j] = sbar[j] + mu * (v[j + 1] - v[j]) / dx;
        } else {
            transport(dt);
            macro(dt);
        }
        refresh_moments();
        t = (target - t - dt < 1e-14) ? target : t + dt;
        ++tr.steps;
        while (next < output_times.size() && output_times[next] <= t + 1e-14) {
            emit();
            ++next;
        }
    }

    std::vector<double> xs(N);
    for (std::size_t j = 0; j < N; ++j) xs[j] = (j + 0.5) * dx;
    tr.F = KineticField(out_t, xs, xi);
    tr.F.provenance = "kinetic-solver";
    for (std::size_t it = 0; it < out_t.size(); ++it)
        for (std::size_t j = 0; j < N; ++j) std::copy(snaps[it][j].begin(), snaps[it][j].end(), tr.F.column(it, j).begin());
    return tr;
}

EquilibriaReport equilibria(const ConstitutiveLaw& law, double S0, double lo, double hi) {
    EquilibriaReport r;
    r.S0 = S0;
    const auto roots = find_roots([&](double x) { return law(x) - S0; }, lo, hi, 4000, 1e-15);
    for (double x : roots) {
        const double sl = law.deriv(x);
        r.roots.push_back({x, sl, sl > 0.0});
        r.max_root_residual = std::max(r.max_root_residual, std::abs(law(x) - S0));
    }
    for (std::size_t i = 1; i < r.roots.size(); ++i)
        if (r.roots[i].stable == r.roots[i - 1].stable) r.interleaved = false;
    for (const auto& e : r.roots)
        if (e.stable) r.stable_roots.push_back(e.xi);
    return r;
}

FrozenResult frozen_kinetics(const std::vector<double>& xi, const std::vector<double>& F0, const ConstitutiveLaw& law,
                             double S0, double T) {
    if (xi.size() != F0.size() || xi.size() < 3) throw std::invalid_argument("frozen_kinetics: bad grid");
    FrozenResult res;
    res.xi = xi;
    res.F0 = F0;
    res.F.assign(xi.size(), 0.0);
    const double lo = xi.front(), hi = xi.back(), pad = hi - lo;
    auto rhs = [&](double y) { return (y < lo - pad || y > hi + pad) ? 0.0 : S0 - law(y); };
    tbb::parallel_for(std::size_t(0), xi.size(), [&](std::size_t k) {
        const double foot = integrate_scalar_ode(rhs, xi[k], T, 0.0, 1e-13, 1e-11);
        res.F[k] = linear_read(xi, F0, foot);
    });
    res.report = equilibria(law, S0, lo, hi);

    // basins of the stable roots are bounded by the unstable roots (or the grid ends)
    std::vector<double> bounds{lo};
    for (const auto& e : res.report.roots)
        if (!e.stable) bounds.push_back(e.xi);
    bounds.push_back(hi);
    res.limit.assign(xi.size(), 0.0);
    for (double s : res.report.stable_roots) {
        std::size_t b = 0;
        while (b + 1 < bounds.size() && bounds[b + 1] < s) ++b;
        const double l = bounds[b], r = bounds[std::min(b + 1, bounds.size() - 1)];
        const double w = linear_read(xi, F0, r) - (l == lo ? 0.0 : linear_read(xi, F0, l));
        const double wm = linear_read(xi, res.F, r) - (l == lo ? 0.0 : linear_read(xi, res.F, l));
        res.report.weights.push_back(w);
        res.measured_weights.push_back(wm);
        for (std::size_t k = 0; k < xi.size(); ++k)
            if (xi[k] >= s) res.limit[k] += w;
    }
    for (const auto& e : res.report.roots)
        res.equilibrium_drift.push_back(std::abs(linear_read(xi, res.F, e.xi) - linear_read(xi, F0, e.xi)));
    res.distance_to_limit = column_distance(xi, res.F, res.limit);
    return res;
}

SignTestResult generalized_kinetic_sign_test(const KineticField& K, const std::function<double(double)>& speed) {
    SignTestResult res;
    const std::size_t nt = K.nt(), nx = K.nx(), nxi = K.nxi();
    if (nt < 3 || nx < 3 || nxi < 3) throw std::invalid_argument("sign test: field too small");
    const double t0 = K.t.front(), t1 = K.t.back(), L = t1 - t0;
    const double dx = K.x[1] - K.x[0];
    const double xlo = K.xi.front(), xhi = K.xi.back();
    const std::vector<double> qs{xlo + 0.125 * (xhi - xlo), xlo + 0.375 * (xhi - xlo), xlo + 0.625 * (xhi - xlo),
                                 xlo + 0.875 * (xhi - xlo)};
    std::vector<double> wxi(nxi), lam(nxi);
    for (std::size_t k = 0; k < nxi; ++k) {
        const double hl = k > 0 ? K.xi[k] - K.xi[k - 1] : 0.0;
        const double hr = k + 1 < nxi ? K.xi[k + 1] - K.xi[k] : 0.0;
        wxi[k] = 0.5 * (hl + hr);
        lam[k] = speed(K.xi[k]);
    }
    // A0[q] = int (1-F) eta', A1[q] = int lambda (1-F) eta' per (t,x)
    const std::size_t nq = qs.size();
    std::vector<double> A0(nt * nx * nq), A1(nt * nx * nq);
    tbb::parallel_for(std::size_t(0), nt * nx, [&](std::size_t idx) {
        auto c = K.column(idx / nx, idx % nx);
        for (std::size_t q = 0; q < nq; ++q) {
            double s0 = 0.0, s1 = 0.0;
            for (std::size_t k = 0; k < nxi; ++k) {
                const double e = wxi[k] * (1.0 - c[k]) * (K.xi[k] - qs[q]);
                s0 += e;
                s1 += e * lam[k];
            }
            A0[idx * nq + q] = s0;
            A1[idx * nq + q] = s1;
        }
    });
    std::vector<double> wt(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double hl = i > 0 ? K.t[i] - K.t[i - 1] : 0.0;
        const double hr = i + 1 < nt ? K.t[i + 1] - K.t[i] : 0.0;
        wt[i] = 0.5 * (hl + hr);
    }
    for (double tc : {t0 + 0.25 * L, t0 + 0.5 * L, t0 + 0.75 * L})
        for (double xc : {0.35, 0.65}) {
            const Bump bt{tc, 0.2 * L}, bx{xc, 0.3};
            for (std::size_t q = 0; q < nq; ++q) {
                double p = 0.0;
                for (std::size_t i = 0; i < nt; ++i) {
                    const double ft = bt.value(K.t[i]), dft = bt.deriv(K.t[i]);
                    if (ft == 0.0 && dft == 0.0) continue;
                    for (std::size_t j = 0; j < nx; ++j) {
                        const double fx = bx.value(K.x[j]), dfx = bx.deriv(K.x[j]);
                        const std::size_t idx = (i * nx + j) * nq + q;
                        p += wt[i] * dx * (dft * fx * A0[idx] + ft * dfx * A1[idx]);
                    }
                }
                res.pairings.push_back({tc, xc, qs[q], -p});
                res.max_value = std::max(res.max_value, -p);
            }
        }
    return res;
}

TartarReport tartar_spread(const KineticField& K, const std::function<double(double)>& speed, double delta,
                           double threshold) {
    TartarReport r;
    r.spread = spread(K);
    r.speed_oscillation.assign(r.spread.size(), 0.0);
    r.max_spread.assign(K.nt(), 0.0);
    for (std::size_t it = 0; it < K.nt(); ++it)
        for (std::size_t ix = 0; ix < K.nx(); ++ix) {
            const std::size_t idx = it * K.nx() + ix;
            r.max_spread[it] = std::max(r.max_spread[it], r.spread[idx]);
            if (r.spread[idx] <= threshold) continue;
            auto c = K.column(it, ix);
            double lmin = INFINITY, lmax = -INFINITY;
            for (std::size_t k = 0; k < c.size(); ++k)
                if (c[k] > delta && c[k] < 1.0 - delta) {
                    const double l = speed(K.xi[k]);
                    lmin = std::min(lmin, l);
                    lmax = std::max(lmax, l);
                }
            if (lmax >= lmin) r.speed_oscillation[idx] = lmax - lmin;
        }
    return r;
}

KineticField stationary_jump_field(double u_left, double u_right, const std::vector<double>& t, std::size_t cells,
                                   const std::vector<double>& xi) {
    std::vector<double> xs(cells);
    for (std::size_t j = 0; j < cells; ++j) xs[j] = (j + 0.5) / cells;
    KineticField K(t, xs, xi);
    K.provenance = "synthetic";
    const auto L = step_column(u_left, xi), R = step_column(u_right, xi);
    for (std::size_t it = 0; it < t.size(); ++it)
        for (std::size_t j = 0; j < cells; ++j) {
            const auto& src = xs[j] < 0.5 ? L : R;
            std::copy(src.begin(), src.end(), K.column(it, j).begin());
        }
    return K;
}

}  // namespace oscillab
