// Oscillatory modes of linear (thermo)viscoelastic systems.
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oscillab {

using cplx = std::complex<double>;

struct RootPair {
    double minus = 0.0;  // fast root, ~ -mu n^2
    double plus = 0.0;   // slow root, ~ -lambda/mu
    bool complex_regime = false;
    cplx c_minus, c_plus;
};

// Roots of r^2 + mu n^2 r + lambda n^2 = 0; n is the wavenumber.
RootPair amplitude_roots_1d(double lambda, double mu, double n);

// -lambda/mu - lambda^2/(mu^3 n^2)
double slow_root_series(double lambda, double mu, double n);

struct LinearParams {
    double lambda = 1.0;
    double mu = 1.0;
    double m = 0.0;
    double kappa = 0.0;
    double n = 1.0;
    void validate() const;
};

// Coefficient matrix of d/dt (a, a', b).
Eigen::Matrix3d amplitude_matrix(const LinearParams& p);

// Roots of the cubic r^3 + (k+mu)n^2 r^2 + (k mu n^4 + lambda n^2 + m^2 n^2) r + k lambda n^4,
// sorted by real part descending.
std::array<cplx, 3> thermo_roots(const LinearParams& p);

// |P(r)| / sum |terms|
double thermo_relative_residual(const LinearParams& p, cplx r);

struct ModeField1D {
    std::vector<double> t, x;
    // row-major [t][x]
    std::vector<double> u, v, theta, strain, strain_rate;
    std::vector<Eigen::Vector3d> amplitude;  // (a, a', b) at each t
};

// Exact amplitude solve of the ansatz u = a(t) e^{inx}/n, theta = -i b(t) e^{inx}; real parts.
ModeField1D mode_field_1d(const LinearParams& p, const Eigen::Vector3d& initial,
                          const std::vector<double>& t, const std::vector<double>& x);

// Initial amplitude on the slowest eigenvector, normalized so a(0) = 1.
Eigen::Vector3d slow_mode_initial(const LinearParams& p);

struct ElasticTensorSet {
    int d = 2;
    std::vector<double> A;  // A[k][l][alpha][beta], flattened row-major, size d^4
    Eigen::MatrixXd M;
    Eigen::VectorXd nu;

    double a(int k, int l, int al, int be) const { return A[((k * d + l) * d + al) * d + be]; }
    static ElasticTensorSet isotropic(int d, double lame_lambda, double lame_mu);
    static ElasticTensorSet identity(int d);
};

struct AcousticSpectrum {
    Eigen::MatrixXd Q, Qm;
    Eigen::VectorXd eigenvalues, modified_eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors, modified_eigenvectors;  // unit columns
    double eigen_residual = 0.0;                          // max ||Q xi - l xi|| / ||Q||
    double rank_one_min = 0.0;                            // min eigenvalue over sampled directions
    int rank_one_directions = 0;
    bool rank_one_convex = false;
};

Eigen::MatrixXd acoustic_tensor(const ElasticTensorSet& ts, const Eigen::VectorXd& nu);
void check_symmetries(const ElasticTensorSet& ts, double tol = 1e-12);
AcousticSpectrum acoustic_spectrum(const ElasticTensorSet& ts);

// Unit directions: icosphere (162 vertices) for d=3, uniform circle for d=2.
std::vector<Eigen::VectorXd> sphere_directions(int d, int count_2d = 162);

// m^r when M nu is parallel to xi^r within angular tolerance, else nullopt.
std::optional<double> coupling_along_mode(const ElasticTensorSet& ts, const AcousticSpectrum& sp, int r,
                                  double tol = 1e-8);

struct ModeFieldMD {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> points;
    // [t][point][component] real parts of u_k; theta separately
    std::vector<std::vector<Eigen::VectorXd>> u;
    std::vector<std::vector<double>> theta;
    std::vector<double> alpha;  // real amplitude alpha(t)
    double lambda_r = 0.0, m_r = 0.0;
};

// Throws if M nu is not parallel to the chosen eigenvector.
ModeFieldMD mode_field_md(const ElasticTensorSet& ts, int r, double mu, double kappa, double n,
                          const std::vector<double>& t, const std::vector<Eigen::VectorXd>& points);

}  // namespace oscillab
