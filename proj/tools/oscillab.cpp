// oscillab command line: one subcommand per module plus run/validate/compare.
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "oscillab/experiment.hpp"

namespace {

using namespace oscillab;

constexpr int kOk = 0, kNumeric = 1, kConfig = 2;

struct Globals {
    std::optional<std::string> out;
    int jobs = 0;
    double tol_scale = 1.0;
};

int report(const RunResult& r) {
    for (const auto& c : r.manifest.checks)
        std::printf("%-40s %s  value=%s %s %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", format_number(c.value).c_str(),
                    c.relation.c_str(), c.relation == "true" ? "" : format_number(c.threshold).c_str());
    std::printf("artifacts: %s\n", r.dir.string().c_str());
    return r.manifest.all_passed() ? kOk : kNumeric;
}

int run_file(const std::string& path, const Globals& g, const std::string& expect_kind, const std::string& action,
             bool check_only) {
    ExperimentConfig cfg = load_config(path);
    if (!expect_kind.empty() && cfg.kind != expect_kind)
        throw ConfigError("kind", "config is of kind '" + cfg.kind + "', subcommand expects '" + expect_kind + "'");
    if (!action.empty()) {
        if (cfg.has("mode") && cfg.mode != action)
            throw ConfigError("mode", "config says '" + cfg.mode + "' but the command asked for '" + action + "'");
        cfg.mode = action;
    }
    validate_config(cfg);
    if (check_only) {
        std::printf("ok\n");
        return kOk;
    }
    if (!(g.tol_scale > 0.0)) throw ConfigError("--tol-scale", "must be positive");
    return report(run_experiment(cfg, {resolve_out_root(g.out), g.tol_scale}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscillab: oscillatory viscoelastic solutions and their kinetic limits"};
    app.require_subcommand(1);
    Globals g;
    std::string out_flag;
    app.add_option("--out", out_flag, "output root (overrides OSCILLAB_OUT)");
    app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--tol-scale", g.tol_scale, "multiply every pass/fail tolerance");

    std::function<int()> action;

    struct ModuleCmd {
        const char* name;
        const char* help;
        std::string act, file;
        bool check = false;
    };
    static ModuleCmd mods[] = {{"law", "build or check a constitutive law"},
                               {"modes", "linear-mode roots, spectra and fields"},
                               {"exact", "exact oscillating weak solutions"},
                               {"direct", "direct PDE solves"},
                               {"ym", "empirical kinetic (Young measure) fields"},
                               {"kinetic", "effective and frozen kinetic solvers"},
                               {"cns", "density kinetic function for compressible flow"}};
    for (auto& m : mods) {
        auto* sc = app.add_subcommand(m.name, m.help);
        sc->add_option("action", m.act, "mode within the module (defaults to the config's mode)");
        sc->add_option("--config,--spec", m.file, "experiment config (TOML)")->required()->check(CLI::ExistingFile);
        sc->add_flag("--check", m.check, "validate the config only");
        sc->callback([&m, &g, &action] {
            action = [&m, &g] { return run_file(m.file, g, m.name, m.act, m.check); };
        });
    }

    std::string run_path;
    auto* run = app.add_subcommand("run", "run any experiment config");
    run->add_option("config", run_path, "experiment config (TOML)")->required()->check(CLI::ExistingFile);
    run->callback([&] { action = [&] { return run_file(run_path, g, "", "", false); }; });

    std::string val_path;
    bool dry = false;
    auto* val = app.add_subcommand("validate", "check a config and print the planned runs");
    val->add_option("config", val_path, "experiment config (TOML)")->required()->check(CLI::ExistingFile);
    val->add_flag("--dry-run", dry, "also print the planned runs");
    val->callback([&] {
        action = [&] {
            const auto cfg = load_config(val_path);
            validate_config(cfg);
            std::printf("ok\n");
            if (dry)
                for (const auto& line : plan(cfg)) std::printf("  %s\n", line.c_str());
            return kOk;
        };
    });

    std::string cmp_a, cmp_b, metric = "cdf_distance";
    auto* cmp = app.add_subcommand("compare", "compare kinetic fields of two runs");
    cmp->add_option("a", cmp_a, "first run directory")->required();
    cmp->add_option("b", cmp_b, "second run directory")->required();
    cmp->add_option("--metric", metric, "cdf_distance or moment-L1");
    cmp->callback([&] {
        action = [&] {
            const auto rows = compare_runs(cmp_a, cmp_b, compare_metric_from_string(metric));
            std::printf("file,t,%s\n", metric.c_str());
            for (const auto& r : rows)
                std::printf("%s,%s,%s\n", r.file.c_str(), format_number(r.t).c_str(), format_number(r.value).c_str());
            return kOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    if (!out_flag.empty()) g.out = out_flag;
    std::unique_ptr<tbb::global_control> gc;
    if (g.jobs > 0) gc = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, g.jobs);

    try {
        return action();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kNumeric;
    }
}
