#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "cqed/scenario.hpp"

using namespace cqed;
namespace fs = std::filesystem;

namespace {

json minimal_config(const std::string& kind) {
    return json{{"params", {{"preset", "fig1"}, {"rabi_over_gamma", 0.1}}},
                {"scenario", {{"kind", kind}}}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cqed_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("config validation") {
    SECTION("unknown keys are rejected with the offending name") {
        json doc = minimal_config("g2");
        doc["params"]["coupling"] = 1.0;
        try {
            parse_config(doc);
            FAIL("expected rejection");
        } catch (const error& e) {
            CHECK(e.code() == errc::config_error);
            CHECK(std::string(e.what()).find("coupling") != std::string::npos);
        }
    }

    SECTION("missing sections are rejected") {
        CHECK_THROWS_AS(parse_config(json{{"params", json::object()}}), error);
    }

    SECTION("unknown scenario kinds and presets are rejected") {
        json doc = minimal_config("warp");
        CHECK_THROWS_AS(parse_config(doc), error);
        json doc2 = minimal_config("g2");
        doc2["params"]["preset"] = "fig2";
        CHECK_THROWS_AS(parse_config(doc2), error);
    }

    SECTION("drive can be given either way but not both") {
        json doc = minimal_config("g2");
        doc["params"]["a_in"] = 0.1;
        CHECK_THROWS_AS(parse_config(doc), error);
    }

    SECTION("presets carry the device constants") {
        const ScenarioConfig cfg = parse_config(minimal_config("g2"));
        CHECK(cfg.params.g == 4.7);
        CHECK(cfg.params.kappa() == Catch::Approx(36.8).epsilon(1e-14));
        CHECK(cfg.params.gamma_par == 0.35);
        CHECK(cfg.params.gamma_perp() == Catch::Approx(0.18).epsilon(1e-12));
        CHECK(cfg.params.gamma_par_enhanced() ==
              Catch::Approx(2.8).epsilon(0.02));

        json dev = minimal_config("g2");
        dev["params"]["preset"] = "device-sec3";
        const ScenarioConfig cfg2 = parse_config(dev);
        CHECK(cfg2.params.kappa1 == Catch::Approx(0.50 * 36.8));
        CHECK(cfg2.params.kappa2 == Catch::Approx(0.42 * 36.8));
        CHECK(cfg2.params.kappa_s == Catch::Approx(0.08 * 36.8));
    }

    SECTION("explicit fields override the preset") {
        json doc = minimal_config("g2");
        doc["params"]["gamma_star"] = 0.0;
        const ScenarioConfig cfg = parse_config(doc);
        CHECK(cfg.params.gamma_star == 0.0);
        CHECK(cfg.params.g == 4.7);
    }
}

TEST_CASE("scenario runs write self-describing artifacts") {
    TempDir tmp;

    SECTION("g2 run emits CSV plus sidecar and reproduces bit-identically") {
        json doc = minimal_config("g2");
        doc["scenario"]["tau_max"] = 0.4;
        doc["scenario"]["tau_points"] = 41;
        doc["numerics"] = {{"n_max", 4}};
        doc["output"] = {{"dir", (tmp.path / "a").string()}, {"stem", "g2run"}};
        ScenarioConfig cfg = parse_config(doc);
        const RunArtifacts art = run_scenario(cfg);
        REQUIRE(fs::exists(art.csv));
        REQUIRE(fs::exists(art.sidecar));
        CHECK(slurp(art.csv).rfind("tau_ns,g2\n", 0) == 0);

        // re-run from the sidecar into a fresh directory
        json sidecar = json::parse(slurp(art.sidecar));
        sidecar["config"]["output"]["dir"] = (tmp.path / "b").string();
        ScenarioConfig cfg2 = parse_config(sidecar);
        const RunArtifacts art2 = run_scenario(cfg2);
        CHECK(slurp(art2.csv) == slurp(art.csv));
    }

    SECTION("filter sweep emits the axis column") {
        json doc = minimal_config("sweep-filter");
        doc["params"]["rabi_over_gamma"] = 0.14;
        doc["scenario"]["axis_min"] = 0.0;
        doc["scenario"]["axis_max"] = 1.0;
        doc["scenario"]["axis_points"] = 5;
        doc["numerics"] = {{"n_max", 6}};
        doc["output"] = {{"dir", (tmp.path / "f").string()}};
        const RunArtifacts art = run_scenario(parse_config(doc));
        const std::string csv = slurp(art.csv);
        CHECK(csv.rfind("filter_transmission,", 0) == 0);
        // 5 rows + header
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    }

    SECTION("spectrum sidecar reports the coherent weight") {
        json doc = minimal_config("spectrum");
        doc["scenario"]["tau_max"] = 5.0;
        doc["scenario"]["tau_points"] = 1501;
        doc["scenario"]["omega_max"] = 20.0;
        doc["scenario"]["omega_points"] = 101;
        doc["numerics"] = {{"n_max", 4}};
        doc["output"] = {{"dir", (tmp.path / "s").string()}};
        const RunArtifacts art = run_scenario(parse_config(doc));
        const json sidecar = json::parse(slurp(art.sidecar));
        const double cw = sidecar["provenance"]["coherent_weight"].get<double>();
        CHECK(cw > 0.9);
        CHECK(cw < 1.0);
    }

    SECTION("hom run reports the zero-delay visibility") {
        json doc = minimal_config("hom");
        doc["params"]["rabi_over_gamma"] = 0.13;
        doc["scenario"]["tau_max"] = 0.5;
        doc["scenario"]["tau_points"] = 51;
        doc["scenario"]["hom"] = {{"delta_t", 2.0}, {"v0", 1.0}};
        doc["numerics"] = {{"n_max", 5}};
        doc["output"] = {{"dir", (tmp.path / "h").string()}};
        const RunArtifacts art = run_scenario(parse_config(doc));
        const json sidecar = json::parse(slurp(art.sidecar));
        CHECK(sidecar["provenance"]["visibility_zero"].get<double>() >= 0.94);
    }

    SECTION("traj run is reproducible through the scenario layer") {
        json doc = minimal_config("traj");
        doc["params"]["rabi_over_gamma"] = 0.2;
        doc["scenario"]["traj"] = {{"n_traj", 24}, {"t_end", 3.0}};
        doc["numerics"] = {{"n_max", 4}, {"seed", 17}};
        doc["output"] = {{"dir", (tmp.path / "t1").string()}};
        const RunArtifacts a = run_scenario(parse_config(doc));
        doc["output"]["dir"] = (tmp.path / "t2").string();
        const RunArtifacts b = run_scenario(parse_config(doc));
        CHECK(slurp(a.csv) == slurp(b.csv));
    }
}

TEST_CASE("directory lock enforces exclusive ownership") {
    TempDir tmp;
    const fs::path dir = tmp.path / "locked";
    DirectoryLock first(dir);
    CHECK_THROWS_AS(DirectoryLock(dir), error);
}

TEST_CASE("atomic write leaves no partial files") {
    TempDir tmp;
    Table t;
    t.columns = {"x", "y"};
    t.add_row({1.0, 2.0});
    write_csv(tmp.path / "out.csv", t);
    CHECK(fs::exists(tmp.path / "out.csv"));
    CHECK(!fs::exists(tmp.path / "out.csv.tmp"));
}
