// Effective kinetic systems for viscoelastic homogenization, frozen-stress kinetics,
// and kinetic-formulation diagnostics for scalar laws.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscillab/constitutive.hpp"
#include "oscillab/young_measure.hpp"

namespace oscillab {

enum class EffectiveForm { Velocity, Stress };  // velocity form: v driven by the mean stress; stress form: S with a moment source

std::string to_string(EffectiveForm f);
EffectiveForm effective_form_from_string(const std::string& s);

struct EffectiveOptions {
    EffectiveForm form = EffectiveForm::Velocity;
    double dt = 2e-3;
    double mu = 1.0;
    bool strang = false;
    double ode_abs_tol = 1e-11;
    double ode_rel_tol = 1e-9;
};

struct EffectiveTrajectory {
    KineticField F;  // [output][cell][xi]
    std::vector<std::vector<double>> v;          // velocity at N+1 nodes
    std::vector<std::vector<double>> S;          // total stress at N cells
    std::vector<std::vector<double>> u_bar;      // moment(F, id)
    std::vector<std::vector<double>> sigma_bar;  // moment(F, sigma)
    double max_mass_defect = 0.0;                // max |moment(F,1) - 1|
    std::size_t steps = 0;
};

// Macroscopic grid: N uniform cells on (0,1) carrying the F columns; velocity at nodes.
// F0 holds one column per cell (any t-size 1 field); v0 sampled at nodes.
// Throws std::runtime_error when a characteristic foot carries mass across the xi-grid ends.
EffectiveTrajectory solve_effective(const KineticField& F0, const std::function<double(double)>& v0,
                                    const ConstitutiveLaw& law, double T, const std::vector<double>& output_times,
                                    const EffectiveOptions& opt = {});

// One semi-Lagrangian step of xi' = S - sigma(xi) over dt (column in place).
void transport_column(std::span<const double> xi, std::span<double> F, const ConstitutiveLaw& law, double S,
                      double dt, double abs_tol = 1e-11, double rel_tol = 1e-9);

struct Equilibrium {
    double xi = 0.0;
    double slope = 0.0;  // sigma'(xi)
    bool stable = false;
};

struct EquilibriaReport {
    double S0 = 0.0;
    std::vector<Equilibrium> roots;  // ascending
    std::vector<double> weights;     // one per stable root
    std::vector<double> stable_roots;
    bool interleaved = true;
    double max_root_residual = 0.0;
};

EquilibriaReport equilibria(const ConstitutiveLaw& law, double S0, double lo, double hi);

struct FrozenResult {
    std::vector<double> xi, F0, F;  // F at time T
    EquilibriaReport report;
    std::vector<double> limit;      // sum of weights times Heaviside at stable roots
    double distance_to_limit = 0.0;
    std::vector<double> measured_weights;  // F(T) mass per basin
    std::vector<double> equilibrium_drift;  // |F(T) - F0| at each root
};

// F0 given on the xi grid (read piecewise linear). Exact backward characteristics.
FrozenResult frozen_kinetics(const std::vector<double>& xi, const std::vector<double>& F0, const ConstitutiveLaw& law,
                             double S0, double T);

// Field of F on a uniform periodic x-grid with times t; lambda = flux speed.
struct SignTestPairing {
    double t_center, x_center, q;  // bump centers, eta = (xi - q)^2 / 2
    double value;
};

struct SignTestResult {
    std::vector<SignTestPairing> pairings;
    double max_value = -INFINITY;
};

SignTestResult generalized_kinetic_sign_test(const KineticField& F, const std::function<double(double)>& speed);

struct TartarReport {
    std::vector<double> spread;          // [t][x]
    std::vector<double> max_spread;      // per time
    std::vector<double> speed_oscillation;  // per (t,x); 0 where spread <= threshold
};

TartarReport tartar_spread(const KineticField& F, const std::function<double(double)>& speed, double delta = 0.05,
                           double threshold = 1e-6);

// Stationary jump from u_left to u_right at x = 0.5, as an empirical field (for counterexamples).
KineticField stationary_jump_field(double u_left, double u_right, const std::vector<double>& t, std::size_t cells,
                                   const std::vector<double>& xi);

}  // namespace oscillab
