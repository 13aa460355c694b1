// Declarative experiments: TOML config -> runs -> CSV/JSON artifacts with a manifest.
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscillab/constitutive.hpp"
#include "oscillab/io.hpp"

namespace oscillab {

// Structural config problem; exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& msg)
        : std::runtime_error(field.empty() ? msg : ("field '" + field + "': " + msg)), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// A run finished but at least one check failed; exit code 1.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string kind, name, mode;
    fs::path source;  // empty for in-memory configs
    std::string hash;
    struct Doc;
    std::shared_ptr<const Doc> doc;

    // Typed lookups on dotted paths, e.g. "law.a"; absent -> default, wrong type -> ConfigError.
    bool has(const std::string& path) const;
    double number(const std::string& path, double def) const;
    double require_number(const std::string& path) const;
    long integer(const std::string& path, long def) const;
    std::string string(const std::string& path, const std::string& def) const;
    std::string require_string(const std::string& path) const;
    bool boolean(const std::string& path, bool def) const;
    std::vector<double> numbers(const std::string& path, const std::vector<double>& def) const;
};

ExperimentConfig load_config(const fs::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Kind-specific structural validation; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& cfg);

// Human-readable planned runs (one line per sweep item).
std::vector<std::string> plan(const ExperimentConfig& cfg);

ConstitutiveLaw build_law(const ExperimentConfig& cfg, const std::string& table = "law");

struct RunOptions {
    fs::path out_root;
    double tol_scale = 1.0;
};

struct RunResult {
    RunManifest manifest;
    fs::path dir;
};

// --out beats OSCILLAB_OUT beats the built-in default "oscillab-out".
fs::path resolve_out_root(const std::optional<std::string>& cli_out);

// Runs every planned item, writes artifacts then the manifest. On a module error a partial manifest
// is written and the exception rethrown.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

enum class CompareMetric { CdfDistance, MomentL1 };
CompareMetric compare_metric_from_string(const std::string& s);

// Per-time metric between two kinetic fields on a common grid (mean over x).
std::vector<double> compare_fields(const KineticField& A, const KineticField& B, CompareMetric metric);

struct CompareRow {
    std::string file;
    double t = 0.0;
    double value = 0.0;
};

// Pairs kinetic-field CSVs of the same name in both run directories.
std::vector<CompareRow> compare_runs(const fs::path& a, const fs::path& b, CompareMetric metric);

}  // namespace oscillab
