// Density-weighted kinetic function H for compressible Navier-Stokes and residual checks.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oscillab/constitutive.hpp"
#include "oscillab/exact_solutions.hpp"

namespace oscillab {

// H stored [t][y][xi]; H(xi_max) is the mean density.
struct DensityKineticField {
    std::vector<double> t, y, xi;
    std::vector<double> H;
    double lam2mu = 1.0;  // lambda + 2 mu

    DensityKineticField() = default;
    DensityKineticField(std::vector<double> t_, std::vector<double> y_, std::vector<double> xi_);
    std::size_t nt() const { return t.size(); }
    std::size_t ny() const { return y.size(); }
    std::size_t nxi() const { return xi.size(); }
    std::span<double> column(std::size_t it, std::size_t iy) { return {H.data() + (it * ny() + iy) * nxi(), nxi()}; }
    std::span<const double> column(std::size_t it, std::size_t iy) const {
        return {H.data() + (it * ny() + iy) * nxi(), nxi()};
    }
    double rho_bar(std::size_t it, std::size_t iy) const { return column(it, iy).back(); }
};

// theta rho1 1_{rho1 < xi} + (1 - theta) rho2 1_{rho2 < xi}
double two_phase_H_value(double theta, double rho1, double rho2, double xi);
std::vector<double> two_phase_H(double theta, double rho1, double rho2, const std::vector<double>& xi);

struct DensityInvariantReport {
    bool ok = true;
    std::string message;
};

// H >= 0, nondecreasing, H(xi_min) = 0; H(xi_max) compared with expected_mass when given (tol relative).
DensityInvariantReport check_invariants(const DensityKineticField& H, const std::vector<double>& expected_mass = {},
                                        double tol = 1e-10);

struct HTransportProblem {
    std::function<double(double t, double y)> u, u_y;
    std::function<double(double t, double y)> p_bar;
    std::function<double(double y, double xi)> H0;  // at t0
    const ConstitutiveLaw* pressure = nullptr;
    double lam2mu = 1.0;
    double t0 = 1.0;
    std::vector<double> y, xi, output_times;
    double abs_tol = 1e-12, rel_tol = 1e-10;
    double xi_cap = 0.0;  // |xi| where characteristics are frozen; 0 means 1e3 max|xi|
};

// Characteristics dy/dt = u, dxi/dt = -xi ((p(xi) - p_bar)/(lambda+2mu) + u_y), traced back to t0;
// H carries the weight exp(-int u_y).
DensityKineticField solve_H_transport_1d(const HTransportProblem& prob);

// Mass endpoint against the continuity equation, centered differences on the output grid.
double continuity_residual(const DensityKineticField& H, const std::function<double(double, double)>& u);

// Compactly supported xi-weights (1 - s^2)^2 with closed-form antiderivative.
struct XiWeight {
    double c = 1.0, r = 0.5;
    double value(double xi) const;
    double antiderivative(double xi) const;  // from c - r
};

struct RenormPairing {
    std::size_t test = 0, weight = 0;
    double approx = 0.0;  // finite-n family
    double limit = 0.0;   // limit two-point measure
};

struct RenormReport {
    std::vector<RenormPairing> pairings;
    double max_approx = 0.0, max_limit = 0.0;
};

std::vector<XiWeight> xi_weight_catalogue(const TwoPhaseSpec& s);
std::vector<TestFunction> renorm_test_catalogue();

// Pairings of the renormalized continuity identity on the shell family at frequency s.n and of the
// limit-measure identity with the pressure defect term; `weights` empty means the default catalogue.
RenormReport renormalized_residual(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double lam2mu, int nt, int nr,
                                   std::vector<XiWeight> weights = {});

}  // namespace oscillab
