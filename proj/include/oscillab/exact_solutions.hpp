// Explicit piecewise oscillatory weak solutions and their certification.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oscillab/constitutive.hpp"
#include "oscillab/numerics.hpp"

namespace oscillab {

struct TwoPhaseSpec {
    double a = 1.0;
    double b = 3.0;
    double theta = 0.5;
    int n = 1;
    int d = 1;

    double c_theta() const { return theta * a + (1.0 - theta) * b; }
    void validate_lagrangian() const;  // 0 < a < 2a < b, theta in (0,1)
    void validate_cns() const;         // 0 < a/2^d < a < b/2^d < b
};

struct LagrangianPoint {
    double u, v, y;
};

// Periodic two-phase strain and velocity at frequency 1, t in [1,2].
LagrangianPoint lagrangian_two_phase(const TwoPhaseSpec& s, double t, double x);
// u_n = U(t, n x), v_n = V(t, n x) / n, y_n = Y(t, n x) / n.
LagrangianPoint lagrangian_rescaled(const TwoPhaseSpec& s, double t, double x);

struct EulerPoint {
    double rho, u;
};

// Eulerian image of the Lagrangian family, rescaled by s.n; u = y / t.
EulerPoint eulerian_shear_1d(const TwoPhaseSpec& s, double t, double y);
// Shell family in R^d (radius r = |y|), rescaled by s.n; radial velocity r / t.
EulerPoint cns_multid(const TwoPhaseSpec& s, double t, double r);

// Pressure scales (1/b, 1/a) matched for the Eulerian 1-D family.
bool euler1d_pressure_matched(const ConstitutiveLaw& p, const TwoPhaseSpec& s, double tol = 1e-10);
bool multid_pressure_matched(const ConstitutiveLaw& p, const TwoPhaseSpec& s, double tol = 1e-10);

struct InterfaceResidual {
    std::string id;
    double t_worst = 0.0;
    double mass_jump = 0.0;
    double flux_jump = 0.0;
};

enum class LagrangianModel { Shear, Gas };

// Law evaluated with the family's own (a, b); interfaces x = k and x = k + theta.
std::vector<InterfaceResidual> rh_residual_lagrangian(const TwoPhaseSpec& s, const ConstitutiveLaw& law,
                                                      LagrangianModel model, const std::vector<double>& t_grid);
std::vector<InterfaceResidual> rh_residual_euler1d(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu,
                                                   const std::vector<double>& t_grid);
std::vector<InterfaceResidual> rh_residual_multid(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu,
                                                  double lambda, const std::vector<double>& t_grid);
double max_flux_jump(const std::vector<InterfaceResidual>& r);
double max_mass_jump(const std::vector<InterfaceResidual>& r);

// Weak form: for each equation, integrand(t, x, phi, phi_t, phi_x) whose (t,x) integral vanishes.
struct WeakFamily {
    using Integrand = std::function<double(double t, double x, double phi, double phi_t, double phi_x)>;
    std::vector<Integrand> equations;
    // Interfaces at time t strictly inside (lo, hi), appended to cuts.
    std::function<void(double t, double lo, double hi, std::vector<double>& cuts)> interfaces;
};

struct TestFunction {
    Bump bt, bx;
};

struct WeakResult {
    double max_abs = 0.0;
    std::vector<double> per_test;  // max over equations
};

// Composite midpoint quadrature on each test support: nt cells in t, nx cells in x,
// x-cells split at the family's interfaces.
WeakResult weak_residual(const WeakFamily& fam, const std::vector<TestFunction>& tests, int nt, int nx);

// 12 products of bumps inside (1,2) x (x_lo, x_hi).
std::vector<TestFunction> test_catalogue(double x_lo, double x_hi);

WeakFamily lagrangian_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& law, LagrangianModel model);
WeakFamily euler1d_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu);
// Radial weak form in R^d with vector test field phi(t,r) y/|y| for momentum.
WeakFamily multid_weak_family(const TwoPhaseSpec& s, const ConstitutiveLaw& p, double mu, double lambda);

struct TwinningSpec {
    Eigen::MatrixXd F0;
    Eigen::VectorXd a, b, nu;
};

struct TwinningReport {
    double condition_residual = 0.0;
    bool roc_checked = false;
    bool roc_violated = false;
    double roc_min_form = 0.0;  // most negative sampled rank-one form
    double roc_t = 0.0, roc_s = 0.0;
};

// Separable stored energy: every entry of F uses `law` as dW/dF_ij.
TwinningReport twinning_check(const TwinningSpec& spec, const ConstitutiveLaw& law,
                              const std::vector<double>& t_grid, int segment_samples = 64);

}  // namespace oscillab
