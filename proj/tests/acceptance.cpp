// Acceptance checks A1..A8. One line per criterion; nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <unistd.h>

#include "oscillab/effective_kinetic.hpp"
#include "oscillab/experiment.hpp"
#include "oscillab/linear_modes.hpp"
#include "oscillab/numerics.hpp"
#include "oscillab/pde_direct.hpp"

using namespace oscillab;

namespace {

const fs::path kConfigs = OSCILLAB_CONFIG_DIR;

struct Verdict {
    bool pass = true;
    std::string detail;
    double budget_s = 0.0;

    void need(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
    void le(const std::string& name, double v, double tol) {
        need(v <= tol, name + "=" + format_number(v) + "<=" + format_number(tol));
    }
    void ge(const std::string& name, double v, double tol) {
        need(v >= tol, name + "=" + format_number(v) + ">=" + format_number(tol));
    }
};

fs::path scratch(const std::string& tag) {
    auto d = fs::temp_directory_path() / ("oscillab-accept-" + std::to_string(::getpid()) + "-" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

struct Ran {
    RunManifest m;
    fs::path dir;
    double value(const std::string& check) const {
        for (const auto& c : m.checks)
            if (c.name == check) return c.value;
        throw std::runtime_error(m.name + ": no check " + check);
    }
};

Ran run_config(const std::string& name, const fs::path& out) {
    RunOptions opt;
    opt.out_root = out;
    auto r = run_experiment(load_config(kConfigs / (name + ".toml")), opt);
    return {r.manifest, r.dir};
}

// |rho_plus - series| n^4 varies by less than a factor 2
void a1(Verdict& v) {
    v.budget_s = 1.0;
    std::vector<double> scaled;
    for (double n : {10.0, 20.0, 40.0, 80.0}) {
        const auto r = amplitude_roots_1d(1.0, 1.0, n);
        scaled.push_back(std::abs(r.plus - slow_root_series(1.0, 1.0, n)) * std::pow(n, 4));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    v.need(*lo > 0.0, "remainder nonzero");
    const double ratio = *hi / *lo;
    v.need(ratio < 2.0, "ratio=" + format_number(ratio) + "<2");
}

void a2(Verdict& v) {
    v.budget_s = 30.0;
    const double lam = 1.0, mu = 1.0;
    const int n = 32;
    const double k = 2.0 * kPi * n;
    const auto r = amplitude_roots_1d(lam, mu, k);
    const std::size_t N = 16 * n;
    ShearState s;
    s.dx = 1.0 / N;
    s.u.resize(N);
    s.v.resize(N + 1);
    // slow eigenvector: v_x = rho u
    const double beta = -r.plus / k;
    for (std::size_t j = 0; j < N; ++j) s.u[j] = std::sin(k * s.x_cell(j));
    for (std::size_t i = 0; i <= N; ++i) s.v[i] = beta * std::cos(k * s.x_node(i));
    StepPolicy pol;
    pol.dt_max = 2e-4;
    const auto t = linspace(0.0, 1.0, 21);
    const auto tr = solve_viscoelastic(s, ConstitutiveLaw::linear(lam), 1.0, t, pol, mu);
    std::vector<double> la;
    for (const auto& snap : tr.snapshots) {
        double proj = 0.0;
        for (std::size_t j = 0; j < N; ++j) proj += 2.0 * s.dx * snap.u[j] * std::sin(k * snap.x_cell(j));
        la.push_back(std::log(std::abs(proj)));
    }
    const double rate = fit_slope(tr.times, la);
    v.le("rel_err", std::abs(rate - r.plus) / std::abs(r.plus), 0.01);
}

void a3(Verdict& v) {
    v.budget_s = 60.0;
    const auto out = scratch("a3");
    for (const char* name : {"exact-lagrangian", "exact-euler1d", "exact-eulermd"}) {
        const auto r = run_config(name, out);
        const std::string n = name;
        v.le(n + ".rh_flux", r.value("rh_flux_jump"), 1e-10);
        v.le(n + ".rh_mass", r.value("rh_mass_jump"), 1e-10);
        v.le(n + ".weak", r.value("weak_residual"), 1e-6);
    }
    const auto bad = run_config("exact-lagrangian-unmatched", out);
    v.ge("unmatched.rh_flux", bad.value("rh_flux_jump"), 1e-3);
    v.ge("unmatched.weak", bad.value("weak_residual"), 1e-3);
    fs::remove_all(out);
}

void a4(Verdict& v) {
    v.budget_s = 600.0;
    const auto out = scratch("a4");
    const auto r = run_config("homogenize", out);
    const auto tab = read_csv(r.dir / "homogenize.csv");
    const auto cn = tab.column("n"), cd = tab.column("time_averaged_distance");
    bool decreasing = tab.rows.size() >= 3;
    for (std::size_t i = 1; i < tab.rows.size(); ++i) decreasing = decreasing && tab.rows[i][cd] < tab.rows[i - 1][cd];
    std::string seq;
    for (const auto& row : tab.rows) seq += (seq.empty() ? "" : ",") + format_number(row[cn]) + ":" + format_number(row[cd]);
    v.need(decreasing, "decreasing(" + seq + ")");
    v.need(!tab.rows.empty() && tab.rows.back()[cn] == 64.0, "finest n=64");
    if (!tab.rows.empty()) v.le("distance_n64", tab.rows.back()[cd], 0.05);
    fs::remove_all(out);
}

void a5(Verdict& v) {
    v.budget_s = 5.0;
    const auto law = ConstitutiveLaw::analytic_cubic(0.0);
    const auto xi = linspace(-2.0, 2.0, 801);
    std::vector<double> F0(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) F0[k] = std::clamp(xi[k] + 0.5, 0.0, 1.0);
    const auto r = frozen_kinetics(xi, F0, law, 0.0, 20.0);
    std::vector<double> limit(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) limit[k] = 0.5 * (xi[k] >= -1.0) + 0.5 * (xi[k] >= 1.0);
    v.le("distance", column_distance(xi, r.F, limit), 0.01);
    // mass below the unstable root at T against F0 there
    const double F0_at_0 = 0.5;
    v.need(!r.measured_weights.empty(), "basins found");
    if (!r.measured_weights.empty()) v.le("weight_err", std::abs(r.measured_weights.front() - F0_at_0), 1e-3);
}

void a6(Verdict& v) {
    v.budget_s = 120.0;
    const auto out = scratch("a6");
    const auto t = run_config("kinetic-tartar", out);
    v.le("spread_ratio", t.value("spread_ratio"), 0.1);
    const auto s = run_config("kinetic-signtest", out);
    v.le("max_pairing", s.value("max_pairing"), 1e-3);
    fs::remove_all(out);
}

void a7(Verdict& v) {
    const auto out = scratch("a7");
    std::size_t configs = 0, checked = 0, fields = 0;
    for (const auto& e : fs::directory_iterator(kConfigs)) {
        if (e.path().extension() != ".toml") continue;
        ++configs;
        RunOptions opt;
        opt.out_root = out;
        RunResult r;
        try {
            r = run_experiment(load_config(e.path()), opt);
        } catch (const std::exception& ex) {
            v.need(false, e.path().stem().string() + " threw: " + ex.what());
            continue;
        }
        for (const auto& c : r.manifest.checks) {
            const bool structural = c.name.rfind("invariants_", 0) == 0 || c.name.rfind("energy_increase", 0) == 0 ||
                                    c.name.rfind("sup_window", 0) == 0;
            if (!structural) continue;
            ++checked;
            if (!c.pass) v.need(false, r.manifest.name + "." + c.name);
        }
        // re-read every written F field and check it from disk
        for (const auto& f : fs::directory_iterator(r.dir)) {
            if (f.path().extension() != ".csv") continue;
            auto header = f.path();
            header.replace_extension(".json");
            if (!fs::exists(header)) continue;
            const auto j = read_json(header);
            if (!j.contains("xi") || j.contains("lambda_plus_2mu")) continue;
            ++fields;
            const auto rep = check_invariants(read_kinetic_field(f.path()));
            if (!rep.ok) v.need(false, r.manifest.name + "/" + f.path().filename().string() + ": " + rep.message);
        }
    }
    v.need(checked > 0 && fields > 0, "configs=" + std::to_string(configs) + " checks=" + std::to_string(checked) +
                                          " fields=" + std::to_string(fields));
    fs::remove_all(out);
}

void a8(Verdict& v) {
    v.budget_s = 120.0;
    const auto out = scratch("a8");
    const auto r = run_config("cns-residual", out);
    v.le("approx", r.value("approx_residual"), 1e-4);
    v.le("renorm", r.value("limit_residual"), 1e-4);
    const auto h = run_config("cns-h-transport", out);
    v.le("H_distance", h.value("H_distance"), 0.02);
    fs::remove_all(out);
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<std::string, std::function<void(Verdict&)>> table = {
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}};
    std::vector<std::string> which;
    for (int i = 1; i < argc; ++i) which.push_back(argv[i]);
    if (which.empty())
        for (const auto& [k, _] : table) which.push_back(k);
    int failed = 0;
    for (const auto& id : which) {
        const auto it = table.find(id);
        if (it == table.end()) {
            std::fprintf(stderr, "unknown criterion %s\n", id.c_str());
            return 2;
        }
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            it->second(v);
        } catch (const std::exception& e) {
            v.need(false, std::string("error: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (v.budget_s > 0.0) v.need(secs < v.budget_s, "runtime<" + format_number(v.budget_s) + "s");
        std::printf("%s %s  %.2fs  %s\n", id.c_str(), v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    return failed ? 1 : 0;
}
