// CSV/JSON artifacts and run manifests.
#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscillab/cns_kinetic.hpp"
#include "oscillab/young_measure.hpp"

namespace oscillab {

namespace fs = std::filesystem;

// 17 significant digits
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header);
    void row(std::initializer_list<double> values);
    void row(std::span<const double> values);
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream out_;
    std::size_t cols_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t column(const std::string& name) const;  // throws if absent
};

CsvTable read_csv(const fs::path& path);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

// Long format (t, x, xi, F) plus a JSON grid header next to it (same stem, .json).
void write_kinetic_field(const fs::path& csv_path, const KineticField& F);
KineticField read_kinetic_field(const fs::path& csv_path);
void write_density_field(const fs::path& csv_path, const DensityKineticField& H);

std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const fs::path& path);

struct CheckRecord {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation = "<=";  // "<=", ">=", or "true"
    bool pass = false;
};

CheckRecord make_check(const std::string& name, double value, const std::string& relation, double threshold);

struct RunManifest {
    std::string name, kind, config_hash, tool_version = OSCILLAB_VERSION;
    double wall_time = 0.0;
    bool complete = true;
    std::string error;
    std::vector<CheckRecord> checks;
    nlohmann::json extra = nlohmann::json::object();
    bool all_passed() const;
};

// Lists every file under dir (except the manifest itself) and writes manifest.json last.
void write_manifest(const fs::path& dir, const RunManifest& m);

}  // namespace oscillab
