#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <string>
#include <unistd.h>
#include <sys/wait.h>

#include <json.hpp>

#include "oscillab/io.hpp"
#include "oscillab/numerics.hpp"
#include "oscillab/young_measure.hpp"

using namespace oscillab;
namespace fs = std::filesystem;

namespace {

const std::string kCli = OSCILLAB_CLI;
const std::string kConfigs = OSCILLAB_CONFIG_DIR;

struct Out {
    int code;
    std::string text;
};

Out sh(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + kCli + " " + args + " 2>&1";
    Out o{0, {}};
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p)) o.text += buf.data();
    const int st = pclose(p);
    o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return o;
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("oscillab-cli-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string cfg(const std::string& name) { return kConfigs + "/" + name + ".toml"; }

}  // namespace

TEST_CASE("validate accepts shipped configs") {
    const auto o = sh("validate " + cfg("law-cubic"));
    CHECK(o.code == 0);
    CHECK(o.text.rfind("ok", 0) == 0);
}

TEST_CASE("missing law is a config error naming the field") {
    const auto d = scratch("bad");
    std::ofstream(d / "bad.toml") << "kind = \"direct\"\nmode = \"shear\"\n[params]\na = 1.0\n";
    const auto o = sh("validate " + (d / "bad.toml").string());
    CHECK(o.code == 2);
    CHECK(o.text.find("law") != std::string::npos);
    std::ofstream(d / "broken.toml") << "kind = \"law\n";
    CHECK(sh("validate " + (d / "broken.toml").string()).code == 2);
    fs::remove_all(d);
}

TEST_CASE("dry run lists the sweep") {
    const auto d = scratch("dry");
    std::ofstream(d / "sweep.toml") << "kind = \"modes\"\nmode = \"roots\"\n[params]\nlambda = 1.0\nmu = 1.0\n"
                                       "[sweep]\nn = [10.0, 20.0, 40.0]\n";
    const auto o = sh("validate --dry-run " + (d / "sweep.toml").string());
    CHECK(o.code == 0);
    int planned = 0;
    std::istringstream in(o.text);
    for (std::string line; std::getline(in, line);)
        if (line.rfind("  ", 0) == 0) ++planned;
    CHECK(planned == 3);
    fs::remove_all(d);
}

TEST_CASE("run writes a manifest listing every file, deterministically") {
    const auto d1 = scratch("r1"), d2 = scratch("r2");
    REQUIRE(sh("--out " + d1.string() + " run " + cfg("modes-roots")).code == 0);
    REQUIRE(sh("--out " + d2.string() + " --jobs 1 run " + cfg("modes-roots")).code == 0);
    const auto run1 = d1 / "modes-roots", run2 = d2 / "modes-roots";
    const auto m = read_json(run1 / "manifest.json");
    std::set<std::string> listed;
    for (const auto& f : m.at("files")) listed.insert(f.at("path").get<std::string>());
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(run1)) {
        if (e.path().filename() == "manifest.json") continue;
        ++on_disk;
        CHECK(listed.count(e.path().filename().string()) == 1);
        if (e.path().extension() == ".csv") CHECK(slurp(e.path()) == slurp(run2 / e.path().filename()));
    }
    CHECK(on_disk == listed.size());
    CHECK(m.at("all_passed").get<bool>());
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("module subcommand and env override of the output root") {
    const auto d = scratch("env");
    const auto o = sh("law check --config " + cfg("law-matched-shear"), "OSCILLAB_OUT=" + d.string());
    CHECK(o.code == 0);
    CHECK(fs::exists(d / "law-matched-shear" / "manifest.json"));
    // action must agree with the config
    CHECK(sh("law nonsense --config " + cfg("law-matched-shear"), "OSCILLAB_OUT=" + d.string()).code == 2);
    CHECK(sh("modes roots --config " + cfg("law-matched-shear"), "OSCILLAB_OUT=" + d.string()).code == 2);
    fs::remove_all(d);
}

TEST_CASE("tol-scale tightens checks into failures") {
    const auto d = scratch("tol");
    CHECK(sh("--out " + d.string() + " run " + cfg("exact-lagrangian")).code == 0);
    const auto o = sh("--out " + d.string() + " --tol-scale 1e-12 run " + cfg("exact-lagrangian"));
    CHECK(o.code == 1);
    CHECK(o.text.find("FAIL") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("compare reports cdf distances") {
    const auto d = scratch("cmp");
    const auto xi = linspace(0.0, 2.0, 201);
    auto field = [&](double c) {
        KineticField F({0.0, 1.0}, {0.25, 0.75}, xi);
        const auto col = step_column(c, xi);
        for (std::size_t it = 0; it < 2; ++it)
            for (std::size_t j = 0; j < 2; ++j) std::copy(col.begin(), col.end(), F.column(it, j).begin());
        return F;
    };
    fs::create_directories(d / "a");
    fs::create_directories(d / "b");
    write_kinetic_field(d / "a" / "F.csv", field(1.0));
    write_kinetic_field(d / "b" / "F.csv", field(1.1));
    auto rows = [](const std::string& text, const std::string& metric = "cdf_distance") {
        std::vector<double> v;
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        CHECK(line == "file,t," + metric);
        while (std::getline(in, line)) v.push_back(std::stod(line.substr(line.rfind(',') + 1)));
        return v;
    };
    const auto same = sh("compare " + (d / "a").string() + " " + (d / "a").string());
    REQUIRE(same.code == 0);
    for (double v : rows(same.text)) CHECK(v == 0.0);
    const auto diff = sh("compare --metric cdf_distance " + (d / "a").string() + " " + (d / "b").string());
    REQUIRE(diff.code == 0);
    const auto v = rows(diff.text);
    REQUIRE(v.size() == 2);
    for (double x : v) CHECK(x == doctest::Approx(0.1).epsilon(1e-9));
    const auto mom = sh("compare --metric moment-L1 " + (d / "a").string() + " " + (d / "b").string());
    for (double x : rows(mom.text, "moment-L1")) CHECK(x == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(sh("compare " + (d / "a").string() + " " + (d / "missing").string()).code == 2);
    fs::remove_all(d);
}
