#include "oscillab/pde_direct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oscillab {

FluxLaw FluxLaw::zero() {
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

FluxLaw FluxLaw::burgers() {
    return {"burgers", [](double u) { return 0.5 * u * u; }, [](double u) { return u; }};
}

FluxLaw FluxLaw::from_name(const std::string& name) {
    if (name == "zero" || name == "heat") return zero();
    if (name == "burgers") return burgers();
    throw std::invalid_argument("unknown flux law '" + name + "'");
}

ShearState two_phase_ic(const TwoPhaseSpec& spec, const std::function<double(double)>& v0, std::size_t cells) {
    if (spec.n < 1) throw std::invalid_argument("two_phase_ic: n must be >= 1");
    if (!(spec.theta >= 0.0 && spec.theta <= 1.0)) throw std::invalid_argument("two_phase_ic: theta outside [0,1]");
    const std::size_t N = cells ? cells : static_cast<std::size_t>(16 * spec.n);
    ShearState s;
    s.dx = 1.0 / N;
    s.u.resize(N);
    s.v.resize(N + 1);
    s.S.assign(N + 1, 0.0);
    for (std::size_t j = 0; j < N; ++j) {
        const double z = spec.n * s.x_cell(j);
        s.u[j] = (z - std::floor(z) < spec.theta) ? spec.a : spec.b;
    }
    for (std::size_t i = 0; i <= N; ++i) s.v[i] = v0(s.x_node(i));
    return s;
}

namespace {

// Cell stresses sigma(u_j) + mu v_x.
std::vector<double> cell_stress(const ShearState& s, const ConstitutiveLaw& law, double mu) {
    std::vector<double> out(s.u.size());
    for (std::size_t j = 0; j < s.u.size(); ++j) out[j] = law(s.u[j]) + mu * (s.v[j + 1] - s.v[j]) / s.dx;
    return out;
}

bool all_finite(const std::vector<double>& a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void refresh_stress(ShearState& s, const ConstitutiveLaw& law, double mu) {
    const auto sig = cell_stress(s, law, mu);
    const std::size_t N = s.u.size();
    s.S.assign(N + 1, 0.0);
    for (std::size_t i = 1; i < N; ++i) s.S[i] = 0.5 * (sig[i - 1] + sig[i]);
}

double shear_energy(const ShearState& s, const ConstitutiveLaw& law) {
    const std::size_t N = s.u.size();
    double e = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 0.5 * s.dx : s.dx;
        e += 0.5 * w * s.v[i] * s.v[i];
    }
    for (std::size_t j = 0; j < N; ++j) e += s.dx * law.energy(s.u[j]);
    return e;
}

ShearTrajectory solve_viscoelastic(const ShearState& ic, const ConstitutiveLaw& law, double T,
                                   const std::vector<double>& output_times, const StepPolicy& policy, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("solve_viscoelastic: mu must be positive");
    if (ic.v.size() != ic.u.size() + 1) throw std::invalid_argument("solve_viscoelastic: staggering mismatch");
    for (std::size_t k = 1; k < output_times.size(); ++k)
        if (!(output_times[k] > output_times[k - 1]))
            throw std::invalid_argument("solve_viscoelastic: output times must be strictly increasing");

    ShearTrajectory tr;
    ShearState s = ic;
    const std::size_t N = s.u.size();
    const double dx = s.dx;
    refresh_stress(s, law, mu);
    const double E0 = shear_energy(s, law);
    const double escale = std::max(std::abs(E0), 1e-300);
    double E = E0;
    tr.dt_smallest = INFINITY;

    std::size_t next = 0;
    auto emit = [&]() {
        refresh_stress(s, law, mu);
        tr.times.push_back(s.t);
        tr.snapshots.push_back(s);
        tr.energy.push_back(shear_energy(s, law));
    };
    while (next < output_times.size() && output_times[next] <= s.t + 1e-14) {
        emit();
        ++next;
    }

    std::vector<double> lower(N + 1), diag(N + 1), upper(N + 1), rhs(N + 1);
    double dt_hint = policy.dt_max;
    while (s.t < T - 1e-14) {
        double target = T;
        if (next < output_times.size()) target = std::min(target, output_times[next]);
        double smax = 0.0;
        for (double u : s.u) smax = std::max(smax, std::abs(law.deriv(u)));
        double dt = std::min(dt_hint, policy.dt_max);
        if (smax > 0.0) dt = std::min({dt, policy.cfl * dx / std::sqrt(smax), mu / smax});
        const double gap = target - s.t;
        bool snap = gap <= dt * (1.0 + 1e-6);
        if (snap) dt = gap;

        for (;;) {
            if (dt < policy.dt_min && !snap) throw std::runtime_error("solve_viscoelastic: time step collapsed at t=" + std::to_string(s.t));
            const double c = dt * mu / dx;
            for (std::size_t i = 0; i <= N; ++i) {
                const double w = (i == 0 || i == N) ? 0.5 * dx : dx;
                const double sr = i < N ? law(s.u[i]) : 0.0;
                const double sl = i > 0 ? law(s.u[i - 1]) : 0.0;
                diag[i] = w + c * ((i < N ? 1.0 : 0.0) + (i > 0 ? 1.0 : 0.0));
                lower[i] = i > 0 ? -c : 0.0;
                upper[i] = i < N ? -c : 0.0;
                rhs[i] = w * s.v[i] + dt * (sr - sl);
            }
            solve_tridiagonal(lower, diag, upper, rhs);
            ShearState trial = s;
            trial.v = rhs;
            for (std::size_t j = 0; j < N; ++j) trial.u[j] += dt * (trial.v[j + 1] - trial.v[j]) / dx;
            trial.t = snap ? target : s.t + dt;
            if (!all_finite(trial.u) || !all_finite(trial.v))
                throw std::runtime_error("solve_viscoelastic: non-finite state at t=" + std::to_string(s.t));
            const double En = shear_energy(trial, law);
            if (En - E > 1e-12 * std::max(std::abs(E0), 1.0) && dt > policy.dt_min * 2.0) {
                ++tr.rejected;
                dt *= 0.5;
                snap = false;
                continue;
            }
            tr.max_energy_increase = std::max(tr.max_energy_increase, (En - E) / escale);
            if (!snap) tr.dt_smallest = std::min(tr.dt_smallest, dt);
            tr.dt_largest = std::max(tr.dt_largest, dt);
            s = std::move(trial);
            E = En;
            ++tr.steps;
            break;
        }
        while (next < output_times.size() && output_times[next] <= s.t + 1e-14) {
            emit();
            ++next;
        }
    }
    if (tr.steps == 0 || std::isinf(tr.dt_smallest)) tr.dt_smallest = 0.0;
    return tr;
}

ScalarState scalar_ic(const std::function<double(double)>& u0, std::size_t cells, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("scalar_ic: viscosity must be positive");
    if (cells < 3) throw std::invalid_argument("scalar_ic: need at least 3 cells");
    ScalarState s;
    s.dx = 1.0 / cells;
    s.eps = eps;
    s.u.resize(cells);
    for (std::size_t j = 0; j < cells; ++j) s.u[j] = u0((j + 0.5) * s.dx);
    return s;
}

ScalarTrajectory solve_viscous_scalar(const ScalarState& ic, const FluxLaw& flux, double T,
                                      const std::vector<double>& output_times, double cfl, double dt_max) {
    if (!(ic.eps > 0.0)) throw std::invalid_argument("solve_viscous_scalar: viscosity must be positive");
    ScalarTrajectory tr;
    ScalarState s = ic;
    const std::size_t N = s.u.size();
    const double dx = s.dx;
    std::size_t next = 0;
    auto emit = [&]() {
        tr.times.push_back(s.t);
        tr.snapshots.push_back(s);
        double m = 0.0, sup = 0.0;
        for (double u : s.u) {
            m += dx * u;
            sup = std::max(sup, std::abs(u));
        }
        tr.mass.push_back(m);
        tr.sup.push_back(sup);
    };
    while (next < output_times.size() && output_times[next] <= s.t + 1e-14) {
        emit();
        ++next;
    }
    std::vector<double> F(N), lower(N), diag(N), upper(N), fu(N), sp(N);
    while (s.t < T - 1e-14) {
        double target = T;
        if (next < output_times.size()) target = std::min(target, output_times[next]);
        double amax = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            fu[j] = flux.f(s.u[j]);
            sp[j] = std::abs(flux.speed(s.u[j]));
            amax = std::max(amax, sp[j]);
        }
        double dt = dt_max;
        if (amax > 0.0) dt = std::min(dt, cfl * dx / amax);
        const bool snap = target - s.t <= dt * (1.0 + 1e-6);
        if (snap) dt = target - s.t;
        // F[j] is the flux through the right face of cell j
        for (std::size_t j = 0; j < N; ++j) {
            const std::size_t r = (j + 1) % N;
            const double alpha = std::max(sp[j], sp[r]);
            F[j] = 0.5 * (fu[j] + fu[r]) - 0.5 * alpha * (s.u[r] - s.u[j]);
        }
        std::vector<double> rhs(N);
        for (std::size_t j = 0; j < N; ++j) rhs[j] = s.u[j] - dt / dx * (F[j] - F[(j + N - 1) % N]);
        const double c = s.eps * dt / (dx * dx);
        std::fill(lower.begin(), lower.end(), -c);
        std::fill(upper.begin(), upper.end(), -c);
        std::fill(diag.begin(), diag.end(), 1.0 + 2.0 * c);
        solve_periodic_tridiagonal(lower, diag, upper, rhs);
        if (!all_finite(rhs)) throw std::runtime_error("solve_viscous_scalar: non-finite state");
        s.u = std::move(rhs);
        s.t = snap ? target : s.t + dt;
        ++tr.steps;
        while (next < output_times.size() && output_times[next] <= s.t + 1e-14) {
            emit();
            ++next;
        }
    }
    return tr;
}

ShearDiagnostics diagnostics(const ShearTrajectory& traj, const ConstitutiveLaw& law, double sup_window) {
    ShearDiagnostics d;
    if (traj.snapshots.empty()) return d;
    d.energy = traj.energy;
    d.sup_window = sup_window > 0.0 ? sup_window : 0.0;
    if (d.sup_window == 0.0)
        for (double u : traj.snapshots.front().u) d.sup_window = std::max(d.sup_window, 2.0 * std::abs(u));
    // kinetic energy <= E(0) - min W over the window, W is not sign-definite
    double wmin = 0.0;
    for (double u : linspace(-d.sup_window, d.sup_window, 4001)) wmin = std::min(wmin, law.energy(u));
    d.integral_bound = std::sqrt(2.0 * std::max(traj.energy.front() - wmin, 0.0));
    for (const auto& s : traj.snapshots) {
        const std::size_t N = s.u.size();
        double sup = 0.0;
        for (double u : s.u) sup = std::max(sup, std::abs(u));
        d.sup_u.push_back(sup);
        std::vector<double> g(N);
        double acc = 0.0;  // int_0^{x_j} v at node j
        for (std::size_t j = 0; j < N; ++j) {
            const double vmid = 0.5 * (s.v[j] + s.v[j + 1]);
            const double half = 0.25 * s.dx * (s.v[j] + vmid);
            g[j] = s.u[j] - (acc + half);
            acc += 0.5 * s.dx * (s.v[j] + s.v[j + 1]);
        }
        d.g.push_back(std::move(g));
        d.velocity_integral.push_back(acc);
        if (std::abs(acc) > d.integral_bound * (1.0 + 1e-12) + 1e-14) d.integral_within_bound = false;
        d.max_boundary_stress = std::max({d.max_boundary_stress, std::abs(s.S.front()), std::abs(s.S.back())});
    }
    for (double sup : d.sup_u)
        if (sup > d.sup_window) d.sup_within_window = false;
    (void)law;
    return d;
}

}  // namespace oscillab
