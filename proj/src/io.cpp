#include "oscillab/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace oscillab {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), cols_(header.size()) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != cols_) throw std::logic_error("csv row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("csv column '" + name + "' missing");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path.string());
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(t.header.size());
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            row.push_back(std::strtod(p, &end));
            if (end == p) throw std::runtime_error("malformed number in " + path.string());
            p = end;
            if (*p == ',') ++p;
        }
        if (row.size() != t.header.size()) throw std::runtime_error("ragged row in " + path.string());
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return nlohmann::json::parse(in);
}

void write_kinetic_field(const fs::path& csv_path, const KineticField& F) {
    CsvWriter w(csv_path, {"t", "x", "xi", "F"});
    for (std::size_t it = 0; it < F.nt(); ++it)
        for (std::size_t ix = 0; ix < F.nx(); ++ix) {
            auto c = F.column(it, ix);
            for (std::size_t k = 0; k < F.nxi(); ++k) w.row({F.t[it], F.x[ix], F.xi[k], c[k]});
        }
    nlohmann::json h{{"t", F.t},
                     {"x", F.x},
                     {"xi", F.xi},
                     {"provenance", F.provenance},
                     {"window", F.window},
                     {"window_clipped", F.window_clipped},
                     {"layout", "t-major, then x, then xi"}};
    fs::path jp = csv_path;
    write_json(jp.replace_extension(".json"), h);
}

KineticField read_kinetic_field(const fs::path& csv_path) {
    fs::path jp = csv_path;
    const auto h = read_json(jp.replace_extension(".json"));
    KineticField F(h.at("t").get<std::vector<double>>(), h.at("x").get<std::vector<double>>(),
                   h.at("xi").get<std::vector<double>>());
    F.provenance = h.value("provenance", std::string("synthetic"));
    F.window = h.value("window", 0.0);
    F.window_clipped = h.value("window_clipped", false);
    const auto tab = read_csv(csv_path);
    const std::size_t cF = tab.column("F");
    if (tab.rows.size() != F.F.size()) throw std::runtime_error("kinetic field size mismatch in " + csv_path.string());
    for (std::size_t i = 0; i < tab.rows.size(); ++i) F.F[i] = tab.rows[i][cF];
    return F;
}

void write_density_field(const fs::path& csv_path, const DensityKineticField& H) {
    CsvWriter w(csv_path, {"t", "y", "xi", "H"});
    for (std::size_t it = 0; it < H.nt(); ++it)
        for (std::size_t iy = 0; iy < H.ny(); ++iy) {
            auto c = H.column(it, iy);
            for (std::size_t k = 0; k < H.nxi(); ++k) w.row({H.t[it], H.y[iy], H.xi[k], c[k]});
        }
    nlohmann::json h{{"t", H.t}, {"y", H.y}, {"xi", H.xi}, {"lambda_plus_2mu", H.lam2mu}};
    fs::path jp = csv_path;
    write_json(jp.replace_extension(".json"), h);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

CheckRecord make_check(const std::string& name, double value, const std::string& relation, double threshold) {
    CheckRecord c{name, value, threshold, relation, false};
    if (relation == "<=")
        c.pass = value <= threshold;
    else if (relation == ">=")
        c.pass = value >= threshold;
    else if (relation == "true")
        c.pass = value != 0.0;
    else
        throw std::logic_error("unknown check relation " + relation);
    if (std::isnan(value)) c.pass = false;
    return c;
}

bool RunManifest::all_passed() const {
    return complete && std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    nlohmann::json files = nlohmann::json::array();
    std::vector<fs::path> paths;
    if (fs::exists(dir))
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        files.push_back({{"path", fs::relative(p, dir).generic_string()},
                         {"bytes", fs::file_size(p)},
                         {"fnv1a", file_hash(p)}});
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : m.checks) {
        nlohmann::json v = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(format_number(c.value));
        checks.push_back({{"name", c.name}, {"value", v}, {"relation", c.relation}, {"threshold", c.threshold},
                          {"pass", c.pass}});
    }
    nlohmann::json j{{"name", m.name},
                     {"kind", m.kind},
                     {"config_hash", m.config_hash},
                     {"tool_version", m.tool_version},
                     {"wall_time_s", m.wall_time},
                     {"status", m.complete ? "complete" : "partial"},
                     {"checks", checks},
                     {"all_passed", m.all_passed()},
                     {"files", files},
                     {"details", m.extra}};
    if (!m.error.empty()) j["error"] = m.error;
    write_json(dir / "manifest.json", j);
}

}  // namespace oscillab
