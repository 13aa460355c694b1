// Fine-scale solvers: 1-D viscoelastic shear (staggered IMEX) and periodic viscous scalar laws.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oscillab/constitutive.hpp"
#include "oscillab/exact_solutions.hpp"

namespace oscillab {

// u at N cell centers, v and S at the N+1 nodes of a uniform grid on (0,1).
struct ShearState {
    double t = 0.0;
    double dx = 0.0;
    std::vector<double> u, v, S;
    std::size_t cells() const { return u.size(); }
    double x_cell(std::size_t j) const { return (j + 0.5) * dx; }
    double x_node(std::size_t i) const { return i * dx; }
};

struct ScalarState {
    double t = 0.0;
    double dx = 0.0;
    double eps = 0.0;
    std::vector<double> u;  // cell averages, periodic
};

// Scalar flux law f with speed f'.
struct FluxLaw {
    std::string name;
    std::function<double(double)> f, speed;
    static FluxLaw zero();
    static FluxLaw burgers();
    static FluxLaw from_name(const std::string& name);
};

// Cells per unit length default 16 n; v0 sampled at nodes.
ShearState two_phase_ic(const TwoPhaseSpec& spec, const std::function<double(double)>& v0,
                        std::size_t cells = 0);

// S at nodes from (u, v): interior nodes average the two adjacent cell stresses; end nodes carry
// the imposed traction-free flux.
void refresh_stress(ShearState& s, const ConstitutiveLaw& law, double mu = 1.0);

struct StepPolicy {
    double cfl = 0.5;
    double dt_max = 1e-3;
    double dt_min = 1e-12;
};

struct ShearTrajectory {
    std::vector<double> times;
    std::vector<ShearState> snapshots;
    std::vector<double> energy;        // at outputs
    double max_energy_increase = 0.0;  // over all accepted steps, relative to E(0)
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double dt_smallest = 0.0, dt_largest = 0.0;
};

double shear_energy(const ShearState& s, const ConstitutiveLaw& law);

// Viscous term implicit, sigma explicit; u updated with the new velocity.
// Throws std::runtime_error if the step size collapses below policy.dt_min or the state turns non-finite.
ShearTrajectory solve_viscoelastic(const ShearState& ic, const ConstitutiveLaw& law, double T,
                                   const std::vector<double>& output_times, const StepPolicy& policy = {},
                                   double mu = 1.0);

struct ScalarTrajectory {
    std::vector<double> times;
    std::vector<ScalarState> snapshots;
    std::vector<double> mass;
    std::vector<double> sup;
    std::size_t steps = 0;
};

ScalarState scalar_ic(const std::function<double(double)>& u0, std::size_t cells, double eps);

// Local Lax-Friedrichs flux, implicit periodic diffusion.
ScalarTrajectory solve_viscous_scalar(const ScalarState& ic, const FluxLaw& flux, double T,
                                      const std::vector<double>& output_times, double cfl = 0.45,
                                      double dt_max = 1e-3);

struct ShearDiagnostics {
    std::vector<double> energy, sup_u, velocity_integral;
    std::vector<std::vector<double>> g;  // u - int_0^x v at cell centers
    double integral_bound = 0.0;         // sqrt(2 E(0))
    bool integral_within_bound = true;
    double sup_window = 0.0;  // configured K
    bool sup_within_window = true;
    double max_boundary_stress = 0.0;
};

// sup_window <= 0 means twice the initial sup norm.
ShearDiagnostics diagnostics(const ShearTrajectory& traj, const ConstitutiveLaw& law, double sup_window = 0.0);

}  // namespace oscillab
