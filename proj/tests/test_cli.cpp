#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cqed_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(CQEDSIM_BINARY) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("version flag") {
    CHECK(run("--version") == 0);
}

TEST_CASE("g2 subcommand produces artifacts") {
    TempDir tmp;
    const fs::path cfg_path = tmp.path / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << json{{"params", {{"preset", "fig1"}, {"rabi_over_gamma", 0.1}}},
                    {"scenario",
                     {{"kind", "g2"}, {"tau_max", 0.3}, {"tau_points", 31}}},
                    {"numerics", {{"n_max", 4}}},
                    {"output", {{"dir", (tmp.path / "out").string()}}}}
                   .dump();
    }
    CHECK(run("g2 --config " + cfg_path.string()) == 0);
    CHECK(fs::exists(tmp.path / "out" / "run.csv"));
    CHECK(fs::exists(tmp.path / "out" / "run.json"));
    const std::string csv = slurp(tmp.path / "out" / "run.csv");
    CHECK(csv.rfind("tau_ns,g2\n", 0) == 0);

    SECTION("re-running on the sidecar reproduces the CSV bit-identically") {
        json sidecar = json::parse(slurp(tmp.path / "out" / "run.json"));
        sidecar["config"]["output"]["dir"] = (tmp.path / "out2").string();
        const fs::path side_path = tmp.path / "side.json";
        std::ofstream(side_path) << sidecar.dump();
        CHECK(run("g2 --config " + side_path.string()) == 0);
        CHECK(slurp(tmp.path / "out2" / "run.csv") == csv);
    }
}

TEST_CASE("config errors exit with status 2") {
    TempDir tmp;
    const fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << json{{"params", {{"preset", "fig1"}, {"zeal", 3}}},
                               {"scenario", {{"kind", "g2"}}}}
                              .dump();
    CHECK(run("g2 --config " + bad.string()) == 2);

    const fs::path not_json = tmp.path / "broken.json";
    std::ofstream(not_json) << "{this is not json";
    CHECK(run("g2 --config " + not_json.string()) == 2);
}

TEST_CASE("sweep subcommand with flags") {
    TempDir tmp;
    CHECK(run("sweep filter --preset fig1 --rabi 0.14 --axis-points 5 --out " +
              (tmp.path / "sw").string()) == 0);
    const std::string csv = slurp(tmp.path / "sw" / "run.csv");
    CHECK(csv.rfind("filter_transmission,", 0) == 0);
}

TEST_CASE("svg decoration is emitted on request") {
    TempDir tmp;
    const fs::path cfg_path = tmp.path / "cfg.json";
    std::ofstream(cfg_path)
        << json{{"params", {{"preset", "fig1"}, {"rabi_over_gamma", 0.14}}},
                {"scenario",
                 {{"kind", "sweep-filter"},
                  {"axis_min", 0.0},
                  {"axis_max", 1.0},
                  {"axis_points", 5}}},
                {"numerics", {{"n_max", 5}}},
                {"output",
                 {{"dir", (tmp.path / "svg").string()},
                  {"formats", json::array({"csv", "svg"})}}}}
               .dump();
    CHECK(run("sweep filter --config " + cfg_path.string()) == 0);
    CHECK(fs::exists(tmp.path / "svg" / "run.svg"));
}

TEST_CASE("locked output directory is refused") {
    TempDir tmp;
    const fs::path dir = tmp.path / "busy";
    fs::create_directories(dir);
    std::ofstream(dir / ".cqedsim.lock") << "";
    CHECK(run("sweep filter --preset fig1 --rabi 0.14 --axis-points 3 --out " +
              dir.string()) == 2);
}
