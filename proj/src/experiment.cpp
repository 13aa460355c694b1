#include "oscillab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <tbb/parallel_for.h>
#include <toml.hpp>

#include "oscillab/cns_kinetic.hpp"
#include "oscillab/effective_kinetic.hpp"
#include "oscillab/exact_solutions.hpp"
#include "oscillab/linear_modes.hpp"
#include "oscillab/numerics.hpp"
#include "oscillab/pde_direct.hpp"
#include "oscillab/young_measure.hpp"

namespace oscillab {

struct ExperimentConfig::Doc {
    toml::table table;
};

namespace {

std::string line_of(const toml::node& n) {
    const auto& src = n.source();
    if (!src.begin) return "";
    return " (line " + std::to_string(src.begin.line) + ")";
}

const toml::node* lookup(const ExperimentConfig& c, const std::string& path) {
    if (!c.doc) return nullptr;
    return c.doc->table.at_path(path).node();
}

const std::set<std::string> kKinds{"law", "modes", "exact", "direct", "ym", "kinetic", "cns", "homogenize-compare"};

const std::map<std::string, std::vector<std::string>> kModes{
    {"law", {"build", "check"}},
    {"modes", {"roots", "spectrum", "field"}},
    {"exact", {"lagrangian", "euler1d", "eulermd", "twinning"}},
    {"direct", {"shear", "scalar"}},
    {"ym", {"extract", "moment", "distance"}},
    {"kinetic", {"effective", "frozen", "signtest", "tartar"}},
    {"cns", {"h-init", "h-transport", "residual"}},
    {"homogenize-compare", {"compare"}}};

const std::map<std::string, std::string> kDefaultMode{{"law", "build"},   {"modes", "roots"},
                                                      {"direct", "shear"}, {"ym", "extract"},
                                                      {"homogenize-compare", "compare"}};

bool needs_law(const std::string& kind, const std::string& mode) {
    if (kind == "modes") return false;
    if (kind == "direct") return mode == "shear";
    if (kind == "kinetic") return mode == "effective" || mode == "frozen";
    if (kind == "cns") return mode != "h-init";
    return true;
}

ExperimentConfig finish_config(ExperimentConfig c, const std::string& text, const std::string& stem) {
    c.hash = fnv1a_hex(text);
    c.kind = c.string("kind", "");
    if (c.kind.empty()) throw ConfigError("kind", "missing field");
    if (!kKinds.count(c.kind)) throw ConfigError("kind", "unknown experiment kind '" + c.kind + "'");
    c.name = c.string("name", stem.empty() ? c.kind : stem);
    if (c.name.empty() || c.name.find('/') != std::string::npos || c.name == "." || c.name == "..")
        throw ConfigError("name", "must be a plain directory name");
    const auto dm = kDefaultMode.find(c.kind);
    c.mode = c.string("mode", dm == kDefaultMode.end() ? "" : dm->second);
    return c;
}

}  // namespace

bool ExperimentConfig::has(const std::string& path) const { return lookup(*this, path) != nullptr; }

double ExperimentConfig::number(const std::string& path, double def) const {
    const toml::node* n = lookup(*this, path);
    if (!n) return def;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError(path, "expected a number" + line_of(*n));
}

double ExperimentConfig::require_number(const std::string& path) const {
    if (!has(path)) throw ConfigError(path, "missing field");
    return number(path, 0.0);
}

long ExperimentConfig::integer(const std::string& path, long def) const {
    const toml::node* n = lookup(*this, path);
    if (!n) return def;
    if (auto v = n->value<int64_t>()) return static_cast<long>(*v);
    throw ConfigError(path, "expected an integer" + line_of(*n));
}

std::string ExperimentConfig::string(const std::string& path, const std::string& def) const {
    const toml::node* n = lookup(*this, path);
    if (!n) return def;
    if (auto v = n->value<std::string>()) return *v;
    throw ConfigError(path, "expected a string" + line_of(*n));
}

std::string ExperimentConfig::require_string(const std::string& path) const {
    if (!has(path)) throw ConfigError(path, "missing field");
    return string(path, "");
}

bool ExperimentConfig::boolean(const std::string& path, bool def) const {
    const toml::node* n = lookup(*this, path);
    if (!n) return def;
    if (auto v = n->value<bool>()) return *v;
    throw ConfigError(path, "expected true or false" + line_of(*n));
}

std::vector<double> ExperimentConfig::numbers(const std::string& path, const std::vector<double>& def) const {
    const toml::node* n = lookup(*this, path);
    if (!n) return def;
    const toml::array* arr = n->as_array();
    if (!arr) {
        if (auto v = n->value<double>()) return {*v};
        throw ConfigError(path, "expected an array of numbers" + line_of(*n));
    }
    std::vector<double> out;
    for (const auto& e : *arr) {
        auto v = e.value<double>();
        if (!v) throw ConfigError(path, "expected an array of numbers" + line_of(e));
        out.push_back(*v);
    }
    if (out.empty()) throw ConfigError(path, "list must not be empty");
    return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig c;
    auto doc = std::make_shared<ExperimentConfig::Doc>();
    try {
        doc->table = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        throw ConfigError("", "parse error at line " + std::to_string(e.source().begin.line) + ": " +
                                  std::string(e.description()));
    }
    c.doc = doc;
    return finish_config(std::move(c), text, "");
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    ExperimentConfig c;
    auto doc = std::make_shared<ExperimentConfig::Doc>();
    try {
        doc->table = toml::parse(text, path.string());
    } catch (const toml::parse_error& e) {
        throw ConfigError("", path.string() + ": parse error at line " + std::to_string(e.source().begin.line) + ": " +
                                  std::string(e.description()));
    }
    c.doc = doc;
    c.source = path;
    return finish_config(std::move(c), text, path.stem().string());
}

namespace {

std::function<double(double)> affine(double slope, double offset) {
    return [slope, offset](double x) { return slope * x + offset; };
}

}  // namespace

ConstitutiveLaw build_law(const ExperimentConfig& cfg, const std::string& table) {
    if (!cfg.has(table)) throw ConfigError(table, "missing field (no law given)");
    const std::string type = cfg.require_string(table + ".type");
    const auto f = [&](const std::string& k) { return table + "." + k; };
    const std::size_t knots = static_cast<std::size_t>(cfg.integer(f("knots"), 64));
    ConstitutiveLaw law = [&]() -> ConstitutiveLaw {
        if (type == "cubic") return ConstitutiveLaw::analytic_cubic(cfg.number(f("shift"), 0.0));
        if (type == "linear") return ConstitutiveLaw::linear(cfg.require_number(f("slope")), cfg.number(f("offset"), 0.0));
        if (type == "matched-shear" || type == "matched-gas" || type == "matched-pressure") {
            const double a = cfg.require_number(f("a")), b = cfg.require_number(f("b"));
            const auto br = affine(cfg.number(f("branch_slope"), 1.0), cfg.number(f("branch_offset"), 0.0));
            try {
                if (type == "matched-shear") return build_matched_shear_stress(a, b, br, knots);
                if (type == "matched-gas") return build_matched_gas_stress(a, b, br, knots);
                return build_matched_pressure(a, b, static_cast<int>(cfg.integer(f("d"), 1)), br, knots);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(table, e.what());
            }
        }
        if (type == "tabulated") {
            auto x = cfg.numbers(f("x"), {});
            auto y = cfg.numbers(f("y"), {});
            if (x.empty()) throw ConfigError(f("x"), "missing field");
            if (x.size() != y.size()) throw ConfigError(f("y"), "must have the same length as x");
            try {
                return ConstitutiveLaw::tabulated(x, y, law_kind_from_string(cfg.string(f("kind"), "tabulated")));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(table, e.what());
            }
        }
        if (type == "file") {
            fs::path p = cfg.require_string(f("path"));
            if (p.is_relative() && !cfg.source.empty()) p = cfg.source.parent_path() / p;
            try {
                return ConstitutiveLaw::from_json(read_json(p));
            } catch (const std::exception& e) {
                throw ConfigError(f("path"), e.what());
            }
        }
        throw ConfigError(f("type"), "unknown law type '" + type + "'");
    }();
    if (cfg.has(f("perturb_knot"))) {
        const long k = cfg.integer(f("perturb_knot"), 0);
        if (k < 0 || static_cast<std::size_t>(k) >= law.knots().size())
            throw ConfigError(f("perturb_knot"), "knot index out of range");
        law = law.perturbed(static_cast<std::size_t>(k), cfg.require_number(f("perturb_delta")));
    }
    return law;
}

namespace {

std::vector<int> n_sweep(const ExperimentConfig& c, std::vector<double> def) {
    std::vector<int> out;
    for (double v : c.numbers("sweep.n", def)) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("sweep.n", "entries must be positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void require_positive(const ExperimentConfig& c, const std::string& path) {
    if (c.has(path) && !(c.number(path, 1.0) > 0.0)) throw ConfigError(path, "must be positive");
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    const auto& modes = kModes.at(cfg.kind);
    if (cfg.mode.empty()) throw ConfigError("mode", "missing field (one of the " + cfg.kind + " modes)");
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end())
        throw ConfigError("mode", "unknown mode '" + cfg.mode + "' for kind " + cfg.kind);
    if (needs_law(cfg.kind, cfg.mode)) (void)build_law(cfg);
    for (const char* p : {"grid.cells", "grid.xi_nodes", "grid.dt", "grid.columns", "params.T", "params.eps",
                          "params.outputs", "params.quadrature", "params.lam2mu", "params.mu"})
        require_positive(cfg, p);
    if (cfg.has("sweep.n")) (void)n_sweep(cfg, {});
    if (cfg.has("sweep.window"))
        for (double w : cfg.numbers("sweep.window", {}))
            if (!(w > 0.0)) throw ConfigError("sweep.window", "entries must be positive");
    if (cfg.has("sweep.eps"))
        for (double e : cfg.numbers("sweep.eps", {}))
            if (!(e > 0.0)) throw ConfigError("sweep.eps", "entries must be positive");
    if (cfg.kind == "kinetic" && cfg.mode == "effective") (void)effective_form_from_string(cfg.string("params.form", "velocity"));
    if (cfg.kind == "direct" && cfg.mode == "scalar") {
        try {
            (void)FluxLaw::from_name(cfg.string("params.flux", "burgers"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("params.flux", e.what());
        }
    }
}

std::vector<std::string> plan(const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    const std::string base = cfg.kind + " " + cfg.mode;
    if (cfg.kind == "direct" || cfg.kind == "homogenize-compare" || (cfg.kind == "modes" && cfg.mode == "roots")) {
        for (int n : n_sweep(cfg, {cfg.number("params.n", cfg.kind == "modes" ? 10 : 8)})) {
            if (cfg.kind == "direct" && cfg.mode == "scalar")
                for (double e : cfg.numbers("sweep.eps", {cfg.number("params.eps", 1e-3)}))
                    out.push_back(base + " n=" + std::to_string(n) + " eps=" + format_number(e));
            else
                out.push_back(base + " n=" + std::to_string(n));
        }
        if (cfg.kind == "homogenize-compare") out.push_back(base + " effective solve");
    } else if (cfg.kind == "ym") {
        for (int n : n_sweep(cfg, {cfg.number("params.n", 8)}))
            for (double w : cfg.numbers("sweep.window", {4.0}))
                out.push_back(base + " n=" + std::to_string(n) + " window=" + format_number(w) + "/n");
    } else {
        out.push_back(base);
    }
    return out;
}

fs::path resolve_out_root(const std::optional<std::string>& cli_out) {
    if (cli_out && !cli_out->empty()) return *cli_out;
    if (const char* env = std::getenv("OSCILLAB_OUT"); env && *env) return env;
    return "oscillab-out";
}

namespace {

struct Ctx {
    const ExperimentConfig& cfg;
    const RunOptions& opt;
    fs::path dir;
    RunManifest& m;

    double p(const std::string& k, double def) const { return cfg.number("params." + k, def); }
    double tol(const std::string& k, double def) const { return cfg.number("tolerances." + k, def); }
    void check(const std::string& name, double value, const std::string& rel, double thr) {
        double t = thr;
        if (rel == "<=") t = thr * opt.tol_scale;
        if (rel == ">=") t = thr / opt.tol_scale;
        m.checks.push_back(make_check(name, value, rel, t));
    }
    void flag(const std::string& name, bool ok) { m.checks.push_back(make_check(name, ok ? 1.0 : 0.0, "true", 1.0)); }
};

TwoPhaseSpec phases(const Ctx& c, int n, int d = 1) {
    TwoPhaseSpec s;
    s.a = c.p("a", 1.0);
    s.b = c.p("b", 3.0);
    s.theta = c.p("theta", 0.5);
    s.n = n;
    s.d = static_cast<int>(c.cfg.integer("params.d", d));
    return s;
}

std::string tag(const std::string& prefix, int n) { return prefix + "_n" + std::to_string(n); }

void run_law(Ctx& c) {
    const auto law = build_law(c.cfg);
    write_json(c.dir / "law.json", law.to_json());
    double lo = c.p("u_lo", NAN), hi = c.p("u_hi", NAN);
    if (std::isnan(lo) || std::isnan(hi)) {
        if (law.knots().empty()) {
            lo = -2.0;
            hi = 2.0;
        } else {
            const double L = law.domain_hi() - law.domain_lo();
            lo = law.domain_lo() - 0.1 * L;
            hi = law.domain_hi() + 0.1 * L;
        }
    }
    CsvWriter w(c.dir / "law.csv", {"u", "sigma", "dsigma", "W"});
    for (double u : linspace(lo, hi, static_cast<std::size_t>(c.cfg.integer("params.samples", 401))))
        w.row({u, law(u), law.deriv(u), law.energy(u)});
    c.m.extra["law_hash"] = law.hash();
    if (const auto& ms = law.match_spec()) {
        const double r = matching_residual(law, ms->identity, ms->a, ms->b, ms->d);
        c.check("matching_residual", r, "<=", c.tol("matching", 1e-10));
        const auto [dmin, dmax] = law.derivative_range(ms->a, ms->identity == MatchIdentity::Pressure ? ms->b : 2.0 * ms->b);
        c.m.extra["derivative_range"] = {dmin, dmax};
        c.flag("non_monotone", dmin < 0.0);
    }
}

void run_modes(Ctx& c) {
    const double lam = c.p("lambda", 1.0), mu = c.p("mu", 1.0), m = c.p("m", 0.0), kap = c.p("kappa", 0.0);
    const auto ns = n_sweep(c.cfg, {10, 20, 40, 80});
    if (c.cfg.mode == "roots") {
        CsvWriter w(c.dir / "roots.csv", {"n", "root_index", "re", "im", "asymptotic", "abs_err"});
        if (m == 0.0 && kap == 0.0) {
            std::vector<double> rem;
            bool real = true;
            for (int n : ns) {
                const auto rp = amplitude_roots_1d(lam, mu, n);
                const double as_minus = -mu * n * n + lam / mu, as_plus = slow_root_series(lam, mu, n);
                w.row({double(n), 0.0, rp.c_minus.real(), rp.c_minus.imag(), as_minus, std::abs(rp.minus - as_minus)});
                w.row({double(n), 1.0, rp.c_plus.real(), rp.c_plus.imag(), as_plus, std::abs(rp.plus - as_plus)});
                real = real && !rp.complex_regime;
                rem.push_back(std::abs(rp.plus - as_plus) * std::pow(double(n), 4));
            }
            c.m.extra["remainder_n4"] = rem;
            if (rem.size() >= 2 && real) {
                const double lo = *std::min_element(rem.begin(), rem.end()), hi = *std::max_element(rem.begin(), rem.end());
                c.check("root_remainder_ratio", lo > 0.0 ? hi / lo : INFINITY, "<=", c.tol("remainder_ratio", 2.0));
            }
        } else {
            double worst = 0.0;
            for (int n : ns) {
                LinearParams lp{lam, mu, m, kap, double(n)};
                lp.validate();
                const auto r = thermo_roots(lp);
                for (int i = 0; i < 3; ++i) {
                    const double res = thermo_relative_residual(lp, r[i]);
                    worst = std::max(worst, res);
                    w.row({double(n), double(i), r[i].real(), r[i].imag(), NAN, res});
                }
            }
            c.check("cubic_relative_residual", worst, "<=", c.tol("residual", 1e-10));
        }
    } else if (c.cfg.mode == "field") {
        LinearParams lp{lam, mu, m, kap, c.p("n", double(ns.front()))};
        lp.validate();
        const auto t = linspace(0.0, c.p("T", 1.0), static_cast<std::size_t>(c.cfg.integer("params.outputs", 20)) + 1);
        const auto x = linspace(0.0, 2.0 * kPi, static_cast<std::size_t>(c.cfg.integer("grid.cells", 64)) + 1);
        const auto f = mode_field_1d(lp, slow_mode_initial(lp), t, x);
        CsvWriter w(c.dir / "mode_field.csv", {"t", "x", "u", "v", "theta", "strain", "strain_rate"});
        double bad = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j) {
                const std::size_t k = i * x.size() + j;
                w.row({t[i], x[j], f.u[k], f.v[k], f.theta[k], f.strain[k], f.strain_rate[k]});
                if (!std::isfinite(f.u[k]) || !std::isfinite(f.theta[k])) bad = 1.0;
            }
        // slow mode decays at the slowest root
        const auto r = thermo_roots(lp);
        const double a1 = f.amplitude.back()(0), a0 = f.amplitude.front()(0);
        const double rate = std::log(std::abs(a1 / a0)) / (t.back() - t.front());
        c.check("slow_mode_rate_error", std::abs(rate - r[0].real()) / std::abs(r[0].real()), "<=",
                c.tol("rate", 1e-8));
        c.flag("finite_field", bad == 0.0);
    } else {
        const int d = static_cast<int>(c.cfg.integer("tensor.d", 3));
        const std::string type = c.cfg.string("tensor.type", "isotropic");
        ElasticTensorSet ts = type == "identity" ? ElasticTensorSet::identity(d)
                                                 : ElasticTensorSet::isotropic(d, c.cfg.number("tensor.lambda", 1.0),
                                                                               c.cfg.number("tensor.mu", 1.0));
        if (c.cfg.has("tensor.nu")) {
            const auto nu = c.cfg.numbers("tensor.nu", {});
            if (static_cast<int>(nu.size()) != d) throw ConfigError("tensor.nu", "must have d entries");
            ts.nu = Eigen::Map<const Eigen::VectorXd>(nu.data(), d).normalized();
        }
        if (c.cfg.has("tensor.M")) {
            const auto M = c.cfg.numbers("tensor.M", {});
            if (static_cast<int>(M.size()) != d * d) throw ConfigError("tensor.M", "must have d*d entries (row-major)");
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) ts.M(i, j) = M[i * d + j];
        }
        const auto sp = acoustic_spectrum(ts);
        CsvWriter w(c.dir / "spectrum.csv", {"index", "eigenvalue", "modified_eigenvalue", "coupling"});
        for (int r = 0; r < d; ++r) {
            const auto mr = coupling_along_mode(ts, sp, r);
            w.row({double(r), sp.eigenvalues(r), sp.modified_eigenvalues(r), mr ? *mr : NAN});
        }
        c.check("eigen_residual", sp.eigen_residual, "<=", c.tol("eigen", 1e-12));
        c.m.extra["rank_one_min"] = sp.rank_one_min;
        c.m.extra["rank_one_directions"] = sp.rank_one_directions;
        c.flag("rank_one_convex", sp.rank_one_convex || !c.cfg.boolean("params.expect_rank_one_convex", true));
    }
}

void write_weak(const fs::path& p, const std::vector<TestFunction>& tests, const WeakResult& r) {
    CsvWriter w(p, {"test", "t_center", "x_center", "residual"});
    for (std::size_t i = 0; i < tests.size(); ++i) w.row({double(i), tests[i].bt.c, tests[i].bx.c, r.per_test[i]});
}

void write_rh(const fs::path& p, const std::vector<InterfaceResidual>& rh, nlohmann::json& extra) {
    CsvWriter w(p, {"interface", "t_worst", "mass_jump", "flux_jump"});
    nlohmann::json ids = nlohmann::json::array();
    for (std::size_t i = 0; i < rh.size(); ++i) {
        w.row({double(i), rh[i].t_worst, rh[i].mass_jump, rh[i].flux_jump});
        ids.push_back(rh[i].id);
    }
    extra["interfaces"] = ids;
}

void run_exact(Ctx& c) {
    const auto law = build_law(c.cfg);
    const std::string fam = c.cfg.mode;
    const auto tg = linspace(1.0, 2.0, static_cast<std::size_t>(c.cfg.integer("params.rh_samples", 101)));
    const int q = static_cast<int>(c.cfg.integer("params.quadrature", 1024));
    const bool matched = c.cfg.string("params.expect", "matched") == "matched";
    if (fam == "twinning") {
        const int d = static_cast<int>(c.cfg.integer("twinning.d", 2));
        auto vec = [&](const std::string& k) {
            const auto v = c.cfg.numbers("twinning." + k, {});
            if (static_cast<int>(v.size()) != d) throw ConfigError("twinning." + k, "must have d entries");
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), d));
        };
        TwinningSpec ts;
        const auto F0 = c.cfg.numbers("twinning.F0", std::vector<double>(d * d, 0.0));
        if (static_cast<int>(F0.size()) != d * d) throw ConfigError("twinning.F0", "must have d*d entries (row-major)");
        ts.F0 = Eigen::MatrixXd(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) ts.F0(i, j) = F0[i * d + j];
        ts.a = vec("a");
        ts.b = vec("b");
        ts.nu = vec("nu");
        const auto rep = twinning_check(ts, law, tg);
        write_json(c.dir / "twinning.json", {{"condition_residual", rep.condition_residual},
                                             {"roc_checked", rep.roc_checked},
                                             {"roc_violated", rep.roc_violated},
                                             {"roc_min_form", rep.roc_min_form},
                                             {"roc_t", rep.roc_t},
                                             {"roc_s", rep.roc_s}});
        if (matched) {
            c.check("twinning_condition_residual", rep.condition_residual, "<=", c.tol("rh", 1e-10));
            c.flag("rank_one_convexity_violated", rep.roc_violated);
        } else {
            c.check("twinning_condition_residual", rep.condition_residual, ">=", c.tol("unmatched", 1e-3));
        }
        return;
    }
    std::vector<InterfaceResidual> rh;
    WeakFamily wf;
    std::vector<TestFunction> tests;
    TwoPhaseSpec s = phases(c, static_cast<int>(c.cfg.integer("params.n", 1)), fam == "eulermd" ? 2 : 1);
    CsvWriter field(c.dir / "field.csv", {"t", "x", "q1", "q2"});
    const auto xs = linspace(fam == "eulermd" ? 0.0 : -1.0, 1.0, 401);
    if (fam == "lagrangian") {
        s.validate_lagrangian();
        const auto model = c.cfg.string("params.model", "shear") == "gas" ? LagrangianModel::Gas : LagrangianModel::Shear;
        rh = rh_residual_lagrangian(s, law, model, tg);
        wf = lagrangian_weak_family(s, law, model);
        tests = test_catalogue(-1.0, 1.0);
        for (double t : {1.0, 1.5, 2.0})
            for (double x : xs) {
                const auto pt = lagrangian_rescaled(s, t, x);
                field.row({t, x, pt.u, pt.v});
            }
    } else if (fam == "euler1d") {
        s.validate_lagrangian();
        const double mu = c.p("mu", 1.0);
        rh = rh_residual_euler1d(s, law, mu, tg);
        wf = euler1d_weak_family(s, law, mu);
        tests = test_catalogue(-1.0, 1.0);
        c.m.extra["pressure_matched"] = euler1d_pressure_matched(law, s);
        for (double t : {1.0, 1.5, 2.0})
            for (double x : xs) {
                const auto pt = eulerian_shear_1d(s, t, x);
                field.row({t, x, pt.rho, pt.u});
            }
    } else {
        s.validate_cns();
        const double mu = c.p("mu", 1.0), lam = c.p("lambda", 1.0);
        rh = rh_residual_multid(s, law, mu, lam, tg);
        wf = multid_weak_family(s, law, mu, lam);
        tests = test_catalogue(0.0, 1.0);
        c.m.extra["pressure_matched"] = multid_pressure_matched(law, s);
        for (double t : {1.0, 1.5, 2.0})
            for (double x : xs) {
                const auto pt = cns_multid(s, t, x);
                field.row({t, x, pt.rho, pt.u});
            }
    }
    write_rh(c.dir / "rh.csv", rh, c.m.extra);
    const auto wr = weak_residual(wf, tests, q, q);
    write_weak(c.dir / "weak.csv", tests, wr);
    if (matched) {
        c.check("rh_flux_jump", max_flux_jump(rh), "<=", c.tol("rh", 1e-10));
        c.check("rh_mass_jump", max_mass_jump(rh), "<=", c.tol("rh", 1e-10));
        c.check("weak_residual", wr.max_abs, "<=", c.tol("weak", 1e-6));
    } else {
        c.check("rh_flux_jump", max_flux_jump(rh), ">=", c.tol("unmatched", 1e-3));
        c.check("weak_residual", wr.max_abs, ">=", c.tol("unmatched", 1e-3));
    }
}

struct ShearSetup {
    TwoPhaseSpec spec;
    double v0_amp = 0.1, T = 1.0, mu = 1.0;
    std::size_t outputs = 10, cells = 0;
    StepPolicy pol;
};

ShearSetup shear_setup(const Ctx& c) {
    ShearSetup s;
    s.spec = phases(c, 1);
    s.v0_amp = c.p("v0_amplitude", 0.1);
    s.T = c.p("T", 1.0);
    s.mu = c.p("mu", 1.0);
    s.outputs = static_cast<std::size_t>(c.cfg.integer("params.outputs", 10));
    s.cells = static_cast<std::size_t>(c.cfg.integer("grid.cells", 0));
    s.pol.cfl = c.cfg.number("grid.cfl", 0.5);
    s.pol.dt_max = c.cfg.number("grid.dt", 1e-3);
    return s;
}

ShearTrajectory run_shear(const ConstitutiveLaw& law, ShearSetup s, int n) {
    s.spec.n = n;
    const double A = s.v0_amp;
    const auto ic = two_phase_ic(s.spec, [A](double x) { return A * std::sin(kPi * x); }, s.cells);
    return solve_viscoelastic(ic, law, s.T, linspace(0.0, s.T, s.outputs + 1), s.pol, s.mu);
}

std::vector<double> cell_centers(std::size_t N) {
    std::vector<double> x(N);
    for (std::size_t j = 0; j < N; ++j) x[j] = (j + 0.5) / N;
    return x;
}

std::vector<std::vector<double>> strain_snapshots(const ShearTrajectory& tr) {
    std::vector<std::vector<double>> u;
    for (const auto& s : tr.snapshots) u.push_back(s.u);
    return u;
}

void write_shear(const fs::path& dir, int n, const ShearTrajectory& tr, const ShearDiagnostics& d) {
    CsvWriter w(dir / (tag("snapshots", n) + ".csv"), {"t", "x", "u", "v", "S"});
    for (const auto& s : tr.snapshots)
        for (std::size_t j = 0; j < s.u.size(); ++j)
            w.row({s.t, s.x_cell(j), s.u[j], 0.5 * (s.v[j] + s.v[j + 1]), 0.5 * (s.S[j] + s.S[j + 1])});
    CsvWriter g(dir / (tag("diagnostics", n) + ".csv"), {"t", "energy", "sup_u", "velocity_integral", "integral_bound"});
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        g.row({tr.times[i], d.energy[i], d.sup_u[i], d.velocity_integral[i], d.integral_bound});
}

void shear_checks(Ctx& c, int n, const ShearTrajectory& tr, const ShearDiagnostics& d) {
    const std::string sfx = "_n" + std::to_string(n);
    c.check("energy_increase" + sfx, tr.max_energy_increase, "<=", c.tol("energy", 1e-8));
    c.check("boundary_stress" + sfx, d.max_boundary_stress, "<=", c.tol("boundary", 1e-8));
    c.flag("velocity_integral_bound" + sfx, d.integral_within_bound);
    c.flag("sup_window" + sfx, d.sup_within_window);
}

void run_direct(Ctx& c) {
    if (c.cfg.mode == "shear") {
        const auto law = build_law(c.cfg);
        const auto setup = shear_setup(c);
        const auto ns = n_sweep(c.cfg, {c.p("n", 8)});
        std::vector<ShearTrajectory> trs(ns.size());
        tbb::parallel_for(std::size_t(0), ns.size(), [&](std::size_t i) { trs[i] = run_shear(law, setup, ns[i]); });
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto d = diagnostics(trs[i], law, c.p("sup_window", 0.0));
            write_shear(c.dir, ns[i], trs[i], d);
            shear_checks(c, ns[i], trs[i], d);
        }
        c.m.extra["law_hash"] = law.hash();
        c.m.extra["dt_policy"] = {{"cfl", setup.pol.cfl}, {"dt_max", setup.pol.dt_max}, {"mu", setup.mu}};
        return;
    }
    const auto flux = FluxLaw::from_name(c.cfg.string("params.flux", "burgers"));
    const auto ns = n_sweep(c.cfg, {c.p("n", 8)});
    const auto eps = c.cfg.numbers("sweep.eps", {c.p("eps", 1e-3)});
    const std::size_t cells = static_cast<std::size_t>(c.cfg.integer("grid.cells", 1024));
    const double T = c.p("T", 0.5), a = c.p("a", 0.0), b = c.p("b", 1.0), th = c.p("theta", 0.5);
    const std::string profile = c.cfg.string("params.profile", "two-phase");
    const auto outs = linspace(0.0, T, static_cast<std::size_t>(c.cfg.integer("params.outputs", 10)) + 1);
    struct Item {
        int n;
        double eps;
        ScalarTrajectory tr;
    };
    std::vector<Item> items;
    for (int n : ns)
        for (double e : eps) items.push_back({n, e, {}});
    tbb::parallel_for(std::size_t(0), items.size(), [&](std::size_t i) {
        const int n = items[i].n;
        auto u0 = [&](double x) {
            if (profile == "sine") return a + b * std::sin(2.0 * kPi * n * x);
            const double z = n * x;
            return z - std::floor(z) < th ? a : b;
        };
        items[i].tr = solve_viscous_scalar(scalar_ic(u0, cells, items[i].eps), flux, T, outs, c.cfg.number("grid.cfl", 0.45),
                                           c.cfg.number("grid.dt", 1e-3));
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& tr = items[i].tr;
        const std::string stem = tag("scalar", items[i].n) + "_eps" + format_number(items[i].eps);
        CsvWriter w(c.dir / (stem + ".csv"), {"t", "x", "u"});
        for (const auto& s : tr.snapshots)
            for (std::size_t j = 0; j < s.u.size(); ++j) w.row({s.t, (j + 0.5) * s.dx, s.u[j]});
        CsvWriter g(c.dir / (stem + "_diagnostics.csv"), {"t", "mass", "sup"});
        double drift = 0.0, sup = 0.0;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            g.row({tr.times[k], tr.mass[k], tr.sup[k]});
            drift = std::max(drift, std::abs(tr.mass[k] - tr.mass.front()));
            sup = std::max(sup, tr.sup[k]);
        }
        const double scale = std::max(std::abs(tr.mass.front()), tr.sup.front());
        const std::string sfx = "_n" + std::to_string(items[i].n) + "_eps" + format_number(items[i].eps);
        c.check("mass_drift" + sfx, scale > 0.0 ? drift / scale : drift, "<=", c.tol("mass", 1e-12));
        c.check("max_principle_excess" + sfx, sup - tr.sup.front(), "<=", c.tol("max_principle", 1e-8));
    }
}

std::vector<double> common_xi(const Ctx& c, double lo, double hi) {
    lo = c.cfg.number("grid.xi_lo", lo);
    hi = c.cfg.number("grid.xi_hi", hi);
    const std::size_t nodes = static_cast<std::size_t>(c.cfg.integer("grid.xi_nodes", 512));
    if (c.cfg.has("grid.xi_lo") && c.cfg.has("grid.xi_hi")) return linspace(lo, hi, nodes);
    return default_xi_grid(lo, hi, nodes, c.cfg.number("grid.xi_pad", 0.1));
}

std::pair<double, double> data_range(const std::vector<ShearTrajectory>& trs) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& tr : trs)
        for (const auto& s : tr.snapshots)
            for (double u : s.u) {
                lo = std::min(lo, u);
                hi = std::max(hi, u);
            }
    return {lo, hi};
}

double field_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

void record_invariants(Ctx& c, const std::string& name, const KineticField& F) {
    const auto r = check_invariants(F);
    if (!r.ok) c.m.extra["invariant_failures"][name] = r.message;
    c.flag("invariants_" + name, r.ok);
}

void run_ym(Ctx& c) {
    const auto law = build_law(c.cfg);
    const auto setup = shear_setup(c);
    const auto ns = n_sweep(c.cfg, {c.p("n", 8)});
    const auto windows = c.cfg.numbers("sweep.window", {4.0});
    std::vector<ShearTrajectory> trs(ns.size());
    tbb::parallel_for(std::size_t(0), ns.size(), [&](std::size_t i) { trs[i] = run_shear(law, setup, ns[i]); });
    const auto [lo, hi] = data_range(trs);
    const auto xi = common_xi(c, lo, hi);
    const std::size_t M = static_cast<std::size_t>(c.cfg.integer("grid.columns", 64));
    const auto xo = cell_centers(M);
    const auto id = Integrand::identity();
    const auto sg = Integrand::stress(law);
    double anchor_gap = 0.0;
    for (double wf : windows) {
        std::vector<KineticField> fields;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const int n = ns[i];
            const auto& tr = trs[i];
            const auto d = diagnostics(tr, law, c.p("sup_window", 0.0));
            shear_checks(c, n, tr, d);
            auto F = empirical_cdf_field(tr.times, cell_centers(tr.snapshots.front().u.size()), strain_snapshots(tr), wf / n,
                                         xi, xo);
            const std::string stem = tag("F", n) + "_w" + format_number(wf);
            write_kinetic_field(c.dir / (stem + ".csv"), F);
            record_invariants(c, stem, F);
            const auto ub = moment(F, id), sb = moment(F, sg);
            CsvWriter w(c.dir / ("moments_" + stem.substr(2) + ".csv"), {"t", "x", "u_bar", "sigma_bar"});
            for (std::size_t it = 0; it < F.nt(); ++it)
                for (std::size_t ix = 0; ix < F.nx(); ++ix) {
                    const std::size_t k = it * F.nx() + ix;
                    w.row({F.t[it], F.x[ix], ub[k], sb[k]});
                    const auto col = F.column(it, ix);
                    anchor_gap = std::max(anchor_gap, std::abs(column_moment_anchored(F.xi, col, sg, 0.0) - sb[k]));
                    anchor_gap = std::max(anchor_gap, std::abs(column_moment_anchored(F.xi, col, id, 0.0) - ub[k]));
                }
            if (F.window_clipped) c.m.extra["window_clipped"].push_back(stem);
            fields.push_back(std::move(F));
        }
        if (fields.size() >= 2) {
            CsvWriter w(c.dir / ("cauchy_w" + format_number(wf) + ".csv"), {"n", "n_next", "mean_distance"});
            std::vector<double> ds;
            for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
                ds.push_back(field_mean(cdf_distance(fields[i], fields[i + 1])));
                w.row({double(ns[i]), double(ns[i + 1]), ds.back()});
            }
            bool dec = true;
            for (std::size_t i = 1; i < ds.size(); ++i) dec = dec && ds[i] < ds[i - 1];
            // other windows are a sensitivity report, only the default one is gated
            const double w_gate = c.p("cauchy_window", 4.0);
            if (ds.size() >= 2 && wf == w_gate) c.flag("cauchy_decreasing_w" + format_number(wf), dec);
            c.m.extra["cauchy"][format_number(wf)] = ds;
        }
    }
    c.check("moment_anchor_consistency", anchor_gap, "<=", c.tol("anchor", 1e-10));
}

KineticField two_point_field(double theta, double a, double b, std::size_t M, const std::vector<double>& xi) {
    KineticField F({0.0}, cell_centers(M), xi);
    const auto col = two_point_column(theta, a, b, xi);
    for (std::size_t j = 0; j < M; ++j) std::copy(col.begin(), col.end(), F.column(0, j).begin());
    return F;
}

void write_macro(const fs::path& p, const EffectiveTrajectory& tr) {
    CsvWriter w(p, {"t", "x", "u_bar", "sigma_bar", "S"});
    for (std::size_t it = 0; it < tr.F.nt(); ++it)
        for (std::size_t j = 0; j < tr.F.nx(); ++j) w.row({tr.F.t[it], tr.F.x[j], tr.u_bar[it][j], tr.sigma_bar[it][j], tr.S[it][j]});
}

// Subset of output times for the written field files.
KineticField time_subset(const KineticField& F, const std::vector<double>& want) {
    std::vector<std::size_t> idx;
    for (double t : want) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < F.nt(); ++i)
            if (std::abs(F.t[i] - t) < std::abs(F.t[best] - t)) best = i;
        if (std::find(idx.begin(), idx.end(), best) == idx.end()) idx.push_back(best);
    }
    std::sort(idx.begin(), idx.end());
    std::vector<double> ts;
    for (auto i : idx) ts.push_back(F.t[i]);
    KineticField out(ts, F.x, F.xi);
    out.provenance = F.provenance;
    out.window = F.window;
    out.window_clipped = F.window_clipped;
    for (std::size_t k = 0; k < idx.size(); ++k)
        for (std::size_t j = 0; j < F.nx(); ++j) {
            auto src = F.column(idx[k], j);
            std::copy(src.begin(), src.end(), out.column(k, j).begin());
        }
    return out;
}

void run_kinetic(Ctx& c) {
    const std::string mode = c.cfg.mode;
    if (mode == "frozen") {
        const auto law = build_law(c.cfg);
        const double S0 = c.p("S0", 0.0), T = c.p("T", 20.0);
        const auto xi = linspace(c.cfg.number("grid.xi_lo", -2.0), c.cfg.number("grid.xi_hi", 2.0),
                                 static_cast<std::size_t>(c.cfg.integer("grid.xi_nodes", 801)));
        std::vector<double> F0(xi.size());
        const std::string init = c.cfg.string("params.initial", "uniform");
        if (init == "uniform") {
            const double lo = c.p("lo", -0.5), hi = c.p("hi", 0.5);
            if (!(lo < hi)) throw ConfigError("params.hi", "must exceed params.lo");
            for (std::size_t k = 0; k < xi.size(); ++k) F0[k] = std::clamp((xi[k] - lo) / (hi - lo), 0.0, 1.0);
        } else if (init == "two-point") {
            F0 = two_point_column(c.p("theta", 0.5), c.p("a", -0.5), c.p("b", 0.5), xi);
        } else {
            throw ConfigError("params.initial", "expected 'uniform' or 'two-point'");
        }
        const auto res = frozen_kinetics(xi, F0, law, S0, T);
        CsvWriter w(c.dir / "frozen.csv", {"xi", "F0", "F", "limit"});
        for (std::size_t k = 0; k < xi.size(); ++k) w.row({xi[k], F0[k], res.F[k], res.limit[k]});
        CsvWriter e(c.dir / "equilibria.csv", {"xi", "slope", "stable", "weight"});
        std::size_t si = 0;
        for (const auto& r : res.report.roots) {
            const double wgt = r.stable ? res.report.weights[si++] : NAN;
            e.row({r.xi, r.slope, r.stable ? 1.0 : 0.0, wgt});
        }
        write_json(c.dir / "weights.json", {{"S0", S0},
                                            {"T", T},
                                            {"stable_roots", res.report.stable_roots},
                                            {"weights", res.report.weights},
                                            {"measured_weights", res.measured_weights},
                                            {"distance_to_limit", res.distance_to_limit}});
        double werr = 0.0;
        for (std::size_t i = 0; i < res.report.weights.size(); ++i)
            werr = std::max(werr, std::abs(res.report.weights[i] - res.measured_weights[i]));
        double drift = 0.0;
        for (double d : res.equilibrium_drift) drift = std::max(drift, d);
        c.check("distance_to_limit", res.distance_to_limit, "<=", c.tol("distance", 0.01));
        c.check("weight_error", werr, "<=", c.tol("weight", 1e-3));
        c.check("root_residual", res.report.max_root_residual, "<=", c.tol("root", 1e-10));
        c.check("equilibrium_drift", drift, "<=", c.tol("drift", 1e-8));
        c.flag("roots_interleave", res.report.interleaved);
        return;
    }
    if (mode == "effective") {
        const auto law = build_law(c.cfg);
        const double a = c.p("a", 1.0), b = c.p("b", 3.0), th = c.p("theta", 0.5), A = c.p("v0_amplitude", 0.1);
        const double T = c.p("T", 0.5);
        const std::size_t M = static_cast<std::size_t>(c.cfg.integer("grid.cells", 64));
        const auto xi = common_xi(c, a, b);
        EffectiveOptions eo;
        eo.form = effective_form_from_string(c.cfg.string("params.form", "velocity"));
        eo.dt = c.cfg.number("grid.dt", 2e-3);
        eo.mu = c.p("mu", 1.0);
        eo.strang = c.cfg.boolean("params.strang", false);
        const auto outs = linspace(0.0, T, static_cast<std::size_t>(c.cfg.integer("params.outputs", 10)) + 1);
        const auto tr = solve_effective(two_point_field(th, a, b, M, xi), [A](double x) { return A * std::sin(kPi * x); },
                                        law, T, outs, eo);
        write_kinetic_field(c.dir / "F_effective.csv", tr.F);
        write_macro(c.dir / "macro.csv", tr);
        record_invariants(c, "F_effective", tr.F);
        c.check("mass_defect", tr.max_mass_defect, "<=", c.tol("mass", 1e-10));
        return;
    }
    // signtest / tartar on a viscous Burgers run
    const auto flux = FluxLaw::from_name(c.cfg.string("params.flux", "burgers"));
    const int n = static_cast<int>(c.cfg.integer("params.n", 32));
    const double eps = c.p("eps", 1e-3), T = c.p("T", 0.5), a = c.p("a", 0.0), b = c.p("b", 1.0), th = c.p("theta", 0.5);
    const std::size_t cells = static_cast<std::size_t>(c.cfg.integer("grid.cells", 1024));
    const std::size_t stride = static_cast<std::size_t>(c.cfg.integer("grid.column_stride", 4));
    const auto outs = linspace(0.0, T, static_cast<std::size_t>(c.cfg.integer("params.outputs", 50)) + 1);
    auto u0 = [&](double x) {
        const double z = n * x;
        return z - std::floor(z) < th ? a : b;
    };
    const auto tr = solve_viscous_scalar(scalar_ic(u0, cells, eps), flux, T, outs, c.cfg.number("grid.cfl", 0.45),
                                         c.cfg.number("grid.dt", 1e-3));
    std::vector<std::vector<double>> us;
    for (const auto& s : tr.snapshots) us.push_back(s.u);
    const auto xc = cell_centers(cells);
    std::vector<double> xo;
    for (std::size_t j = 0; j < cells; j += std::max<std::size_t>(stride, 1)) xo.push_back(xc[j]);
    const auto xi = common_xi(c, std::min(a, b), std::max(a, b));
    const auto F = empirical_cdf_field(tr.times, xc, us, c.p("window", 4.0) / n, xi, xo, true);
    record_invariants(c, "F_scalar", F);
    const auto sign = generalized_kinetic_sign_test(F, flux.speed);
    const auto tart = tartar_spread(F, flux.speed);
    CsvWriter pw(c.dir / "pairings.csv", {"t_center", "x_center", "q", "value"});
    for (const auto& p : sign.pairings) pw.row({p.t_center, p.x_center, p.q, p.value});
    CsvWriter sw(c.dir / "spread.csv", {"t", "max_spread"});
    for (std::size_t i = 0; i < F.nt(); ++i) sw.row({F.t[i], tart.max_spread[i]});
    CsvWriter fw(c.dir / "spread_field.csv", {"t", "x", "spread", "speed_oscillation"});
    for (std::size_t i = 0; i < F.nt(); ++i)
        for (std::size_t j = 0; j < F.nx(); ++j) {
            const std::size_t k = i * F.nx() + j;
            fw.row({F.t[i], F.x[j], tart.spread[k], tart.speed_oscillation[k]});
        }
    if (c.cfg.boolean("params.write_field", false))
        write_kinetic_field(c.dir / "F_scalar.csv", time_subset(F, {0.0, 0.5 * T, T}));
    const double ratio = tart.max_spread.front() > 0.0 ? tart.max_spread.back() / tart.max_spread.front() : 0.0;
    c.m.extra["max_pairing"] = sign.max_value;
    c.m.extra["spread_ratio"] = ratio;
    if (mode == "signtest") c.check("max_pairing", sign.max_value, "<=", c.tol("pairing", 1e-3));
    if (mode == "tartar") c.check("spread_ratio", ratio, "<=", c.tol("spread", 0.1));
}

void run_cns(Ctx& c) {
    const double th = c.p("theta", 0.5), a = c.p("a", 1.0), b = c.p("b", 3.0);
    if (c.cfg.mode == "h-init") {
        const int d = static_cast<int>(c.cfg.integer("params.d", 1));
        const auto ts = c.cfg.numbers("params.times", {1.0, 1.5, 2.0});
        const auto xi = linspace(0.0, c.cfg.number("grid.xi_hi", 1.25 * b), static_cast<std::size_t>(c.cfg.integer("grid.xi_nodes", 401)));
        DensityKineticField H(ts, {0.0}, xi);
        std::vector<double> mass;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double td = std::pow(ts[i], d);
            const auto col = two_phase_H(th, a / td, b / td, xi);
            std::copy(col.begin(), col.end(), H.column(i, 0).begin());
            mass.push_back((th * a + (1.0 - th) * b) / td);
        }
        write_density_field(c.dir / "H_init.csv", H);
        const auto r = check_invariants(H, mass, 1e-12);
        c.flag("invariants_H_init", r.ok);
        return;
    }
    const auto p = build_law(c.cfg);
    const double lam2mu = c.p("lam2mu", 1.0);
    if (c.cfg.mode == "h-transport") {
        const auto outs = linspace(1.0, 2.0, static_cast<std::size_t>(c.cfg.integer("params.outputs", 10)) + 1);
        const auto xi = linspace(0.0, c.cfg.number("grid.xi_hi", 1.25 * b), static_cast<std::size_t>(c.cfg.integer("grid.xi_nodes", 401)));
        HTransportProblem prob;
        prob.u = [](double t, double y) { return y / t; };
        prob.u_y = [](double t, double) { return 1.0 / t; };
        prob.p_bar = [&](double t, double) { return th * p(a / t) + (1.0 - th) * p(b / t); };
        prob.H0 = [&](double, double z) { return two_phase_H_value(th, a, b, z); };
        prob.pressure = &p;
        prob.lam2mu = lam2mu;
        prob.t0 = 1.0;
        prob.y = linspace(0.0, 1.0, static_cast<std::size_t>(c.cfg.integer("grid.cells", 33)));
        prob.xi = xi;
        prob.output_times = outs;
        const auto H = solve_H_transport_1d(prob);
        write_density_field(c.dir / "H_transport.csv", H);
        const double L = xi.back() - xi.front();
        double worst = 0.0;
        std::vector<double> mass;
        CsvWriter w(c.dir / "H_distance.csv", {"t", "max_normalized_distance"});
        for (std::size_t i = 0; i < H.nt(); ++i) {
            const auto ex = two_phase_H(th, a / H.t[i], b / H.t[i], xi);
            const double rb = (th * a + (1.0 - th) * b) / H.t[i];
            double wt = 0.0;
            for (std::size_t j = 0; j < H.ny(); ++j) {
                wt = std::max(wt, column_distance(xi, H.column(i, j), ex) / (rb * L));
                mass.push_back(rb);
            }
            w.row({H.t[i], wt});
            worst = std::max(worst, wt);
        }
        const auto inv = check_invariants(H);
        c.flag("invariants_H_transport", inv.ok);
        c.check("H_distance", worst, "<=", c.tol("distance", 0.02));
        c.check("continuity_residual", continuity_residual(H, prob.u), "<=", c.tol("continuity", 1e-3));
        return;
    }
    TwoPhaseSpec s = phases(c, static_cast<int>(c.cfg.integer("params.n", 4)), 2);
    const int q = static_cast<int>(c.cfg.integer("params.quadrature", 1024));
    const auto rep = renormalized_residual(s, p, lam2mu, q, q);
    CsvWriter w(c.dir / "renorm.csv", {"test", "weight", "approx", "limit"});
    for (const auto& r : rep.pairings) w.row({double(r.test), double(r.weight), r.approx, r.limit});
    if (c.cfg.string("params.expect", "matched") == "matched") {
        c.check("approx_residual", rep.max_approx, "<=", c.tol("residual", 1e-4));
        c.check("limit_residual", rep.max_limit, "<=", c.tol("residual", 1e-4));
    } else {
        c.check("limit_residual", rep.max_limit, ">=", c.tol("unmatched", 1e-2));
    }
}

void run_homogenize(Ctx& c) {
    const auto law = build_law(c.cfg);
    const auto setup = shear_setup(c);
    const auto ns = n_sweep(c.cfg, {16, 32, 64});
    const std::size_t M = static_cast<std::size_t>(c.cfg.integer("grid.columns", 64));
    const double wf = c.p("window", 4.0);
    std::vector<ShearTrajectory> trs(ns.size());
    tbb::parallel_for(std::size_t(0), ns.size(), [&](std::size_t i) { trs[i] = run_shear(law, setup, ns[i]); });
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto d = diagnostics(trs[i], law, c.p("sup_window", 0.0));
        shear_checks(c, ns[i], trs[i], d);
    }
    const auto [lo, hi] = data_range(trs);
    const auto xi = common_xi(c, std::min(lo, setup.spec.a), std::max(hi, setup.spec.b));
    // normalize by the support actually visited, not by the (padded) grid
    const double L = std::max(hi, setup.spec.b) - std::min(lo, setup.spec.a);
    c.m.extra["support_length"] = L;
    EffectiveOptions eo;
    eo.form = effective_form_from_string(c.cfg.string("params.form", "velocity"));
    eo.dt = c.cfg.number("grid.effective_dt", 1e-3);
    eo.mu = setup.mu;
    const double A = setup.v0_amp;
    const auto eff = solve_effective(two_point_field(setup.spec.theta, setup.spec.a, setup.spec.b, M, xi),
                                     [A](double x) { return A * std::sin(kPi * x); }, law, setup.T, trs.front().times, eo);
    record_invariants(c, "F_effective", eff.F);
    const std::vector<double> keep{0.0, 0.5 * setup.T, setup.T};
    write_kinetic_field(c.dir / "F_effective.csv", time_subset(eff.F, keep));
    CsvWriter table(c.dir / "homogenize.csv", {"n", "time_averaged_distance"});
    std::vector<double> dist;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto& tr = trs[i];
        const auto F = empirical_cdf_field(tr.times, cell_centers(tr.snapshots.front().u.size()), strain_snapshots(tr),
                                           wf / ns[i], xi, eff.F.x);
        record_invariants(c, tag("F", ns[i]), F);
        const auto d = cdf_distance(F, eff.F);
        CsvWriter s(c.dir / (tag("distance", ns[i]) + ".csv"), {"t", "normalized_distance"});
        std::vector<double> per_t(F.nt());
        for (std::size_t it = 0; it < F.nt(); ++it) {
            double acc = 0.0;
            for (std::size_t j = 0; j < F.nx(); ++j) acc += d[it * F.nx() + j];
            per_t[it] = acc / F.nx() / L;
            s.row({F.t[it], per_t[it]});
        }
        double integral = 0.0;
        for (std::size_t it = 0; it + 1 < F.nt(); ++it)
            integral += 0.5 * (F.t[it + 1] - F.t[it]) * (per_t[it] + per_t[it + 1]);
        dist.push_back(integral / (F.t.back() - F.t.front()));
        table.row({double(ns[i]), dist.back()});
        if (i + 1 == ns.size()) write_kinetic_field(c.dir / (tag("F", ns[i]) + ".csv"), time_subset(F, keep));
    }
    bool dec = true;
    for (std::size_t i = 1; i < dist.size(); ++i) dec = dec && dist[i] < dist[i - 1];
    c.m.extra["distances"] = dist;
    c.flag("distance_decreasing", dec);
    c.check("distance_finest", dist.back(), "<=", c.tol("distance", 0.05));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    validate_config(cfg);
    RunResult res;
    res.dir = opt.out_root / cfg.name;
    if (fs::exists(res.dir)) {
        if (fs::exists(res.dir / "manifest.json"))
            fs::remove_all(res.dir);
        else if (!fs::is_empty(res.dir))
            throw ConfigError("name", "output directory " + res.dir.string() + " exists and is not a previous run");
    }
    fs::create_directories(res.dir);
    RunManifest& m = res.manifest;
    m.name = cfg.name;
    m.kind = cfg.kind + (cfg.mode.empty() ? "" : ":" + cfg.mode);
    m.config_hash = cfg.hash;
    m.extra["plan"] = plan(cfg);
    m.extra["tol_scale"] = opt.tol_scale;
    Ctx ctx{cfg, opt, res.dir, m};
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
        if (cfg.kind == "law") run_law(ctx);
        else if (cfg.kind == "modes") run_modes(ctx);
        else if (cfg.kind == "exact") run_exact(ctx);
        else if (cfg.kind == "direct") run_direct(ctx);
        else if (cfg.kind == "ym") run_ym(ctx);
        else if (cfg.kind == "kinetic") run_kinetic(ctx);
        else if (cfg.kind == "cns") run_cns(ctx);
        else run_homogenize(ctx);
    } catch (const std::exception& e) {
        m.complete = false;
        m.error = e.what();
        m.wall_time = elapsed();
        write_manifest(res.dir, m);
        throw;
    }
    m.wall_time = elapsed();
    write_manifest(res.dir, m);
    return res;
}

CompareMetric compare_metric_from_string(const std::string& s) {
    if (s == "cdf_distance" || s == "cdf-distance") return CompareMetric::CdfDistance;
    if (s == "moment-L1" || s == "moment_l1") return CompareMetric::MomentL1;
    throw ConfigError("metric", "unknown metric '" + s + "' (expected cdf_distance or moment-L1)");
}

std::vector<double> compare_fields(const KineticField& A, const KineticField& B, CompareMetric metric) {
    if (A.xi != B.xi || A.t != B.t || A.x != B.x) throw std::invalid_argument("compare: grid mismatch");
    std::vector<double> out(A.nt(), 0.0);
    if (metric == CompareMetric::CdfDistance) {
        const auto d = cdf_distance(A, B);
        for (std::size_t it = 0; it < A.nt(); ++it) {
            for (std::size_t j = 0; j < A.nx(); ++j) out[it] += d[it * A.nx() + j];
            out[it] /= A.nx();
        }
    } else {
        const auto ma = moment(A, Integrand::identity()), mb = moment(B, Integrand::identity());
        for (std::size_t it = 0; it < A.nt(); ++it) {
            for (std::size_t j = 0; j < A.nx(); ++j) out[it] += std::abs(ma[it * A.nx() + j] - mb[it * A.nx() + j]);
            out[it] /= A.nx();
        }
    }
    return out;
}

std::vector<CompareRow> compare_runs(const fs::path& a, const fs::path& b, CompareMetric metric) {
    if (!fs::is_directory(a) || !fs::is_directory(b)) throw ConfigError("", "compare needs two run directories");
    std::vector<CompareRow> rows;
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto p = e.path();
        if (p.extension() != ".csv") continue;
        fs::path header = p;
        header.replace_extension(".json");
        if (!fs::exists(header) || !read_json(header).contains("xi")) continue;
        fs::path other = b / p.filename();
        if (fs::exists(other)) names.push_back(p.filename());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) throw std::invalid_argument("compare: no kinetic fields present in both runs");
    for (const auto& nm : names) {
        const auto A = read_kinetic_field(a / nm), B = read_kinetic_field(b / nm);
        const auto v = compare_fields(A, B, metric);
        for (std::size_t i = 0; i < v.size(); ++i) rows.push_back({nm.string(), A.t[i], v[i]});
    }
    return rows;
}

}  // namespace oscillab
