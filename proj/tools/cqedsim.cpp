// Command-line runner: every computation as a subcommand emitting CSV with a
// JSON provenance sidecar (re-runnable bit-identically), plus optional SVG.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "cqed/cqed.hpp"

namespace {

using cqed::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good())
        cqed::fail(cqed::errc::config_error, "cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        cqed::fail(cqed::errc::config_error,
                   std::string("config is not valid JSON: ") + e.what());
    }
}

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string formats = "csv";
    std::uint64_t seed = 0;
    bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config (or sidecar) file");
    cmd->add_option("--preset", args.preset,
                    "parameter preset: fig1 | fig1-sideleak | device-sec3");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "random seed")->each([&args](const std::string&) {
        args.has_seed = true;
    });
    cmd->add_option("--format", args.formats, "output formats, e.g. csv or csv,svg");
}

json base_doc(const CommonArgs& args, const std::string& kind) {
    json doc;
    if (!args.config_path.empty()) {
        doc = load_json_file(args.config_path);
        if (doc.contains("config")) doc = doc.at("config");
    } else {
        doc = json{{"params", json::object()}, {"scenario", {{"kind", kind}}}};
    }
    if (!args.preset.empty()) doc["params"]["preset"] = args.preset;
    if (!doc["params"].contains("preset") && !doc["params"].contains("g") &&
        args.config_path.empty())
        doc["params"]["preset"] = "fig1";
    if (!doc["scenario"].contains("kind")) doc["scenario"]["kind"] = kind;
    if (args.has_seed) doc["numerics"]["seed"] = args.seed;
    if (!args.out_dir.empty()) doc["output"]["dir"] = args.out_dir;
    if (args.formats.find("svg") != std::string::npos) {
        doc["output"]["formats"] = json::array({"csv", "svg"});
    }
    return doc;
}

int run_with_lock(const json& doc) {
    cqed::ScenarioConfig cfg = cqed::parse_config(doc);
    cqed::DirectoryLock lock(cfg.out_dir);
    const cqed::RunArtifacts art = cqed::run_scenario(cfg);
    std::cout << "wrote " << art.csv.string() << " and " << art.sidecar.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cqedsim: photon statistics of a coherently driven "
                 "emitter-cavity system"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cqed::version);

    CommonArgs g2_args, sweep_args, spec_args, hom_args, traj_args;

    auto* cmd_g2 = app.add_subcommand("g2", "second-order correlation trace");
    add_common(cmd_g2, g2_args);
    std::string g2_field = "";
    double g2_rabi = -1.0, g2_irf = -1.0, g2_taumax = -1.0;
    cmd_g2->add_option("--field", g2_field, "reflected | transmitted | sl | filtered");
    cmd_g2->add_option("--rabi", g2_rabi, "drive strength Omega/Gamma");
    cmd_g2->add_option("--irf-sigma", g2_irf, "Gaussian timing response width (ns)");
    cmd_g2->add_option("--tau-max", g2_taumax, "delay window (ns)");

    auto* cmd_sweep = app.add_subcommand("sweep", "interference sweeps");
    add_common(cmd_sweep, sweep_args);
    std::string sweep_kind;
    cmd_sweep->add_option("what", sweep_kind, "lo | detuning | power | filter")
        ->required();
    std::string sweep_field = "";
    double ax_min = std::nan(""), ax_max = std::nan("");
    int ax_points = -1;
    double sweep_rabi = -1.0;
    cmd_sweep->add_option("--field", sweep_field, "field kind for detuning/power");
    cmd_sweep->add_option("--axis-min", ax_min, "axis start");
    cmd_sweep->add_option("--axis-max", ax_max, "axis end");
    cmd_sweep->add_option("--axis-points", ax_points, "axis sample count");
    cmd_sweep->add_option("--rabi", sweep_rabi, "drive strength Omega/Gamma");

    auto* cmd_spectrum = app.add_subcommand("spectrum", "emission spectrum");
    add_common(cmd_spectrum, spec_args);
    double spec_rabi = -1.0, spec_omax = -1.0;
    std::string spec_field = "";
    cmd_spectrum->add_option("--field", spec_field, "field kind");
    cmd_spectrum->add_option("--rabi", spec_rabi, "drive strength Omega/Gamma");
    cmd_spectrum->add_option("--omega-max", spec_omax, "frequency window (2pi GHz)");

    auto* cmd_hom = app.add_subcommand("hom", "interferometer correlations");
    add_common(cmd_hom, hom_args);
    double hom_dt = -1.0, hom_v0 = -1.0, hom_rabi = -1.0;
    cmd_hom->add_option("--delta-t", hom_dt, "path delay (ns)");
    cmd_hom->add_option("--v0", hom_v0, "wave-packet overlap");
    cmd_hom->add_option("--rabi", hom_rabi, "drive strength Omega/Gamma");

    auto* cmd_traj = app.add_subcommand("traj", "trajectory oracle moments");
    add_common(cmd_traj, traj_args);
    int traj_n = -1;
    double traj_tend = -1.0, traj_rabi = -1.0;
    cmd_traj->add_option("--n-traj", traj_n, "trajectory count");
    cmd_traj->add_option("--t-end", traj_tend, "horizon (ns)");
    cmd_traj->add_option("--rabi", traj_rabi, "drive strength Omega/Gamma");

    auto* cmd_validate =
        app.add_subcommand("validate", "run the full validation suite");
    int validate_traj = 10000;
    cmd_validate->add_option("--n-traj", validate_traj,
                             "trajectory count for the oracle checks");

    try {
        app.parse(argc, argv);

        if (cmd_validate->parsed()) {
            const auto results = cqed::run_acceptance_suite(validate_traj);
            return cqed::report_acceptance(results);
        }

        json doc;
        if (cmd_g2->parsed()) {
            doc = base_doc(g2_args, "g2");
            if (!g2_field.empty()) doc["scenario"]["field"] = g2_field;
            if (g2_rabi >= 0.0) doc["params"]["rabi_over_gamma"] = g2_rabi;
            if (g2_irf >= 0.0) doc["scenario"]["irf_sigma"] = g2_irf;
            if (g2_taumax > 0.0) doc["scenario"]["tau_max"] = g2_taumax;
            if (!doc["params"].contains("rabi_over_gamma") &&
                !doc["params"].contains("a_in"))
                doc["params"]["rabi_over_gamma"] = 0.1;
        } else if (cmd_sweep->parsed()) {
            doc = base_doc(sweep_args, "sweep-" + sweep_kind);
            if (!sweep_field.empty()) doc["scenario"]["field"] = sweep_field;
            if (!std::isnan(ax_min)) doc["scenario"]["axis_min"] = ax_min;
            if (!std::isnan(ax_max)) doc["scenario"]["axis_max"] = ax_max;
            if (ax_points > 0) doc["scenario"]["axis_points"] = ax_points;
            if (sweep_rabi >= 0.0) doc["params"]["rabi_over_gamma"] = sweep_rabi;
            if (!doc["params"].contains("rabi_over_gamma") &&
                !doc["params"].contains("a_in"))
                doc["params"]["rabi_over_gamma"] = 0.14;
            // sensible default axes per sweep kind
            if (!doc["scenario"].contains("axis_min")) {
                if (sweep_kind == "lo") {
                    doc["scenario"]["axis_min"] = -3.0;
                    doc["scenario"]["axis_max"] = 3.0;
                } else if (sweep_kind == "detuning") {
                    doc["scenario"]["axis_min"] = -30.0;
                    doc["scenario"]["axis_max"] = 30.0;
                } else if (sweep_kind == "power") {
                    doc["scenario"]["axis_min"] = 0.05;
                    doc["scenario"]["axis_max"] = 2.0;
                } else {
                    doc["scenario"]["axis_min"] = 0.0;
                    doc["scenario"]["axis_max"] = 1.0;
                }
            }
        } else if (cmd_spectrum->parsed()) {
            doc = base_doc(spec_args, "spectrum");
            if (!spec_field.empty()) doc["scenario"]["field"] = spec_field;
            if (spec_rabi >= 0.0) doc["params"]["rabi_over_gamma"] = spec_rabi;
            if (spec_omax > 0.0) doc["scenario"]["omega_max"] = spec_omax;
            if (!doc["params"].contains("rabi_over_gamma") &&
                !doc["params"].contains("a_in"))
                doc["params"]["rabi_over_gamma"] = 0.1;
            if (!doc["scenario"].contains("tau_max")) {
                doc["scenario"]["tau_max"] = 6.0;
                doc["scenario"]["tau_points"] = 4001;
            }
        } else if (cmd_hom->parsed()) {
            doc = base_doc(hom_args, "hom");
            if (hom_dt > 0.0) doc["scenario"]["hom"]["delta_t"] = hom_dt;
            if (hom_v0 >= 0.0) doc["scenario"]["hom"]["v0"] = hom_v0;
            if (hom_rabi >= 0.0) doc["params"]["rabi_over_gamma"] = hom_rabi;
            if (!doc["params"].contains("rabi_over_gamma") &&
                !doc["params"].contains("a_in"))
                doc["params"]["rabi_over_gamma"] = 0.13;
        } else if (cmd_traj->parsed()) {
            doc = base_doc(traj_args, "traj");
            if (traj_n > 0) doc["scenario"]["traj"]["n_traj"] = traj_n;
            if (traj_tend > 0.0) doc["scenario"]["traj"]["t_end"] = traj_tend;
            if (traj_rabi >= 0.0) doc["params"]["rabi_over_gamma"] = traj_rabi;
            if (!doc["params"].contains("rabi_over_gamma") &&
                !doc["params"].contains("a_in"))
                doc["params"]["rabi_over_gamma"] = 0.2;
        }
        return run_with_lock(doc);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const cqed::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case cqed::errc::config_error:
            case cqed::errc::invalid_filter:
            case cqed::errc::io_error:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
