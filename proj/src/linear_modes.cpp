#include "oscillab/linear_modes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "oscillab/numerics.hpp"

namespace oscillab {

RootPair amplitude_roots_1d(double lambda, double mu, double n) {
    RootPair r;
    const double n2 = n * n;
    const double b = mu * n2, c = lambda * n2;
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        r.minus = -0.5 * (b + std::sqrt(disc));
        r.plus = (r.minus != 0.0) ? c / r.minus : 0.0;
        r.c_minus = r.minus;
        r.c_plus = r.plus;
    } else {
        r.complex_regime = true;
        const double im = 0.5 * std::sqrt(-disc);
        r.c_plus = cplx(-0.5 * b, im);
        r.c_minus = cplx(-0.5 * b, -im);
        r.plus = r.minus = -0.5 * b;
    }
    return r;
}

double slow_root_series(double lambda, double mu, double n) {
    return -lambda / mu - lambda * lambda / (mu * mu * mu * n * n);
}

void LinearParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("linear params: lambda must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("linear params: mu must be > 0");
    if (!(kappa >= 0.0)) throw std::invalid_argument("linear params: kappa must be >= 0");
    if (!(n >= 1.0)) throw std::invalid_argument("linear params: n must be >= 1");
}

Eigen::Matrix3d amplitude_matrix(const LinearParams& p) {
    const double n2 = p.n * p.n;
    Eigen::Matrix3d A;
    A << 0.0, 1.0, 0.0, -p.lambda * n2, -p.mu * n2, p.m * n2, 0.0, -p.m, -p.kappa * n2;
    return A;
}

namespace {

std::array<double, 3> cubic_coeffs(const LinearParams& p) {
    const double n2 = p.n * p.n, n4 = n2 * n2;
    return {p.kappa * p.lambda * n4, p.kappa * p.mu * n4 + p.lambda * n2 + p.m * p.m * n2,
            (p.kappa + p.mu) * n2};
}

cplx eval_cubic(const std::array<double, 3>& c, cplx r) { return ((r + c[2]) * r + c[1]) * r + c[0]; }
cplx eval_cubic_deriv(const std::array<double, 3>& c, cplx r) { return (3.0 * r + 2.0 * c[2]) * r + c[1]; }

}  // namespace

std::array<cplx, 3> thermo_roots(const LinearParams& p) {
    p.validate();
    const auto c = cubic_coeffs(p);
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(0, 2) = -c[0];
    comp(1, 2) = -c[1];
    comp(2, 2) = -c[2];
    comp(1, 0) = 1.0;
    comp(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
    std::array<cplx, 3> roots;
    for (int i = 0; i < 3; ++i) {
        cplx r = es.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {  // Newton polish
            const cplx d = eval_cubic_deriv(c, r);
            if (std::abs(d) == 0.0) break;
            const cplx step = eval_cubic(c, r) / d;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            r -= step;
        }
        roots[i] = r;
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return roots;
}

double thermo_relative_residual(const LinearParams& p, cplx r) {
    const auto c = cubic_coeffs(p);
    const double a = std::abs(r);
    const double scale = a * a * a + std::abs(c[2]) * a * a + std::abs(c[1]) * a + std::abs(c[0]);
    return std::abs(eval_cubic(c, r)) / scale;
}

Eigen::Vector3d slow_mode_initial(const LinearParams& p) {
    const Eigen::Matrix3d A = amplitude_matrix(p);
    Eigen::EigenSolver<Eigen::Matrix3d> es(A, true);
    // slowest eigenvector that moves the displacement; a decoupled theta mode has a = 0
    int best = -1;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3cd c = es.eigenvectors().col(i);
        if (std::abs(c(0)) <= 1e-12 * c.norm()) continue;
        if (best < 0 || es.eigenvalues()[i].real() > es.eigenvalues()[best].real()) best = i;
    }
    if (best < 0) throw std::runtime_error("slow mode has zero displacement amplitude");
    Eigen::Vector3cd vec = es.eigenvectors().col(best);
    vec /= vec(0);
    return vec.real();
}

ModeField1D mode_field_1d(const LinearParams& p, const Eigen::Vector3d& initial, const std::vector<double>& t,
                          const std::vector<double>& x) {
    p.validate();
    const Eigen::Matrix3d A = amplitude_matrix(p);
    ModeField1D f;
    f.t = t;
    f.x = x;
    const std::size_t nt = t.size(), nx = x.size();
    f.u.resize(nt * nx);
    f.v.resize(nt * nx);
    f.theta.resize(nt * nx);
    f.strain.resize(nt * nx);
    f.strain_rate.resize(nt * nx);
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < nt; ++i) {
        const Eigen::Matrix3d E = (A * t[i]).exp();
        const Eigen::Vector3d s = E * initial;
        f.amplitude.push_back(s);
        for (std::size_t j = 0; j < nx; ++j) {
            const cplx e = std::exp(I * p.n * x[j]);
            const std::size_t k = i * nx + j;
            f.u[k] = (s(0) * e / p.n).real();
            f.v[k] = (s(1) * e / p.n).real();
            f.theta[k] = (-I * s(2) * e).real();
            f.strain[k] = (I * s(0) * e).real();
            f.strain_rate[k] = (I * s(1) * e).real();
        }
    }
    return f;
}

ElasticTensorSet ElasticTensorSet::isotropic(int d, double lame_lambda, double lame_mu) {
    ElasticTensorSet ts;
    ts.d = d;
    ts.A.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
    auto del = [](int i, int j) { return i == j ? 1.0 : 0.0; };
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int al = 0; al < d; ++al)
                for (int be = 0; be < d; ++be)
                    ts.A[((k * d + l) * d + al) * d + be] =
                        lame_lambda * del(k, al) * del(l, be) +
                        lame_mu * (del(k, l) * del(al, be) + del(k, be) * del(l, al));
    ts.M = Eigen::MatrixXd::Zero(d, d);
    ts.nu = Eigen::VectorXd::Unit(d, 0);
    return ts;
}

ElasticTensorSet ElasticTensorSet::identity(int d) {
    ElasticTensorSet ts;
    ts.d = d;
    ts.A.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
    for (int k = 0; k < d; ++k)
        for (int al = 0; al < d; ++al) ts.A[((k * d + k) * d + al) * d + al] = 1.0;
    ts.M = Eigen::MatrixXd::Zero(d, d);
    ts.nu = Eigen::VectorXd::Unit(d, 0);
    return ts;
}

Eigen::MatrixXd acoustic_tensor(const ElasticTensorSet& ts, const Eigen::VectorXd& nu) {
    const int d = ts.d;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int al = 0; al < d; ++al)
                for (int be = 0; be < d; ++be) Q(k, l) += ts.a(k, l, al, be) * nu(al) * nu(be);
    return Q;
}

void check_symmetries(const ElasticTensorSet& ts, double tol) {
    const int d = ts.d;
    if (d < 1 || ts.A.size() != static_cast<std::size_t>(d * d * d * d))
        throw std::invalid_argument("elastic tensor: size must be d^4");
    if (ts.M.rows() != d || ts.M.cols() != d) throw std::invalid_argument("coupling tensor: must be d x d");
    if (ts.nu.size() != d || std::abs(ts.nu.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("direction nu must be a unit d-vector");
    // Only the (alpha,beta)-symmetric part enters the equations; it must be symmetric in (k,l).
    double scale = 0.0;
    for (double v : ts.A) scale = std::max(scale, std::abs(v));
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int al = 0; al < d; ++al)
                for (int be = 0; be < d; ++be) {
                    const double s_kl = ts.a(k, l, al, be) + ts.a(k, l, be, al);
                    const double s_lk = ts.a(l, k, al, be) + ts.a(l, k, be, al);
                    if (std::abs(s_kl - s_lk) > tol * std::max(1.0, scale))
                        throw std::invalid_argument("elastic tensor violates the (k,l) symmetry");
                }
}

std::vector<Eigen::VectorXd> sphere_directions(int d, int count_2d) {
    std::vector<Eigen::VectorXd> out;
    if (d == 1) {
        out.push_back(Eigen::VectorXd::Ones(1));
        return out;
    }
    if (d == 2) {
        for (int i = 0; i < count_2d; ++i) {
            const double ang = 2.0 * kPi * i / count_2d;
            Eigen::VectorXd v(2);
            v << std::cos(ang), std::sin(ang);
            out.push_back(v);
        }
        return out;
    }
    if (d != 3) throw std::invalid_argument("sphere_directions: d must be 1, 2 or 3");
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> verts = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                                          {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                                          {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int level = 0; level < 2; ++level) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int i, int j) {
            auto key = std::minmax(i, j);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            verts.push_back((verts[i] + verts[j]).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            mid[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& f : faces) {
            const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    for (const auto& v : verts) out.emplace_back(Eigen::VectorXd(v));
    return out;
}

AcousticSpectrum acoustic_spectrum(const ElasticTensorSet& ts) {
    check_symmetries(ts);
    AcousticSpectrum sp;
    sp.Q = acoustic_tensor(ts, ts.nu);
    sp.Q = 0.5 * (sp.Q + sp.Q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sp.Q);
    sp.eigenvalues = es.eigenvalues();
    sp.eigenvectors = es.eigenvectors();
    const double qn = std::max(sp.Q.norm(), 1e-300);
    for (int r = 0; r < ts.d; ++r) {
        const Eigen::VectorXd xi = sp.eigenvectors.col(r);
        sp.eigen_residual = std::max(sp.eigen_residual, (sp.Q * xi - sp.eigenvalues(r) * xi).norm() / qn);
    }
    const Eigen::VectorXd mnu = ts.M * ts.nu;
    sp.Qm = sp.Q + mnu * mnu.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(sp.Qm);
    sp.modified_eigenvalues = esm.eigenvalues();
    sp.modified_eigenvectors = esm.eigenvectors();
    const auto dirs = sphere_directions(ts.d);
    sp.rank_one_directions = static_cast<int>(dirs.size());
    sp.rank_one_min = INFINITY;
    for (const auto& nu : dirs) {
        Eigen::MatrixXd Qn = acoustic_tensor(ts, nu);
        Qn = 0.5 * (Qn + Qn.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(Qn, Eigen::EigenvaluesOnly);
        sp.rank_one_min = std::min(sp.rank_one_min, e.eigenvalues()(0));
    }
    sp.rank_one_convex = sp.rank_one_min > 0.0;
    return sp;
}

std::optional<double> coupling_along_mode(const ElasticTensorSet& ts, const AcousticSpectrum& sp, int r, double tol) {
    const Eigen::VectorXd mnu = ts.M * ts.nu;
    const Eigen::VectorXd xi = sp.eigenvectors.col(r);
    const double norm = mnu.norm();
    if (norm == 0.0) return 0.0;
    const double m = xi.dot(mnu);
    const double perp = (mnu - m * xi).norm() / norm;  // sine of the angle
    if (perp > tol) return std::nullopt;
    return m;
}

ModeFieldMD mode_field_md(const ElasticTensorSet& ts, int r, double mu, double kappa, double n,
                          const std::vector<double>& t, const std::vector<Eigen::VectorXd>& points) {
    const AcousticSpectrum sp = acoustic_spectrum(ts);
    if (r < 0 || r >= ts.d) throw std::invalid_argument("mode_field_md: eigen index out of range");
    const auto m = coupling_along_mode(ts, sp, r);
    if (!m) throw std::runtime_error("mode_field_md: coupling hypothesis (M nu parallel to xi) fails");
    LinearParams p{sp.eigenvalues(r), mu, *m, kappa, n};
    const Eigen::Vector3d init = slow_mode_initial(p);
    const Eigen::Matrix3d A = amplitude_matrix(p);
    ModeFieldMD f;
    f.t = t;
    f.points = points;
    f.lambda_r = sp.eigenvalues(r);
    f.m_r = *m;
    const Eigen::VectorXd xi = sp.eigenvectors.col(r);
    const cplx I(0.0, 1.0);
    for (double ti : t) {
        const Eigen::Vector3d s = (A * ti).exp() * init;
        f.alpha.push_back(s(0));
        std::vector<Eigen::VectorXd> ut;
        std::vector<double> th;
        for (const auto& xpt : points) {
            const cplx e = std::exp(I * n * ts.nu.dot(xpt));
            ut.emplace_back(((s(0) / n) * e).real() * xi);
            th.push_back((-I * s(2) * e).real());
        }
        f.u.push_back(std::move(ut));
        f.theta.push_back(std::move(th));
    }
    return f;
}

}  // namespace oscillab
