#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/correlations.hpp"
#include "cqed/detection.hpp"
#include "cqed/errors.hpp"
#include "cqed/hom.hpp"
#include "cqed/io.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/mcwf.hpp"
#include "cqed/params.hpp"
#include "cqed/version.hpp"

namespace cqed {

// ---------------------------------------------------------------------------
// Scenario configuration: schema-validated JSON document
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& obj, const std::string& section,
                           const std::set<std::string>& allowed) {
    require(obj.is_object(), errc::config_error,
            "section '" + section + "' must be an object");
    for (const auto& [key, _] : obj.items())
        require(allowed.count(key) != 0, errc::config_error,
                "unknown key '" + key + "' in section '" + section +
                    "'; allowed keys: " + [&] {
                        std::string s;
                        for (const auto& k : allowed) s += k + " ";
                        return s;
                    }());
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(errc::config_error, "bad value for '" + key + "': " + e.what());
    }
}

inline double get_req(const json& obj, const std::string& key,
                      const std::string& section) {
    require(obj.contains(key), errc::config_error,
            "missing required key '" + key + "' in section '" + section + "'");
    require(obj.at(key).is_number(), errc::config_error,
            "'" + key + "' must be a number");
    return obj.at(key).get<double>();
}

} // namespace detail

struct ScenarioConfig {
    json doc; // resolved, validated document

    SystemParams params;
    double rabi_over_gamma = 0.0; ///< 0 = a_in given directly

    std::string kind;             ///< g2 | sweep-lo | sweep-detuning |
                                  ///< sweep-power | sweep-filter | spectrum |
                                  ///< hom | traj
    std::string field = "reflected";
    double e_lo_ratio = 1.0;
    double filter_transmission = 0.0;
    double tau_max = 2.0;
    int tau_points = 801;
    double irf_sigma = 0.0;
    double axis_min = 0.0, axis_max = 1.0;
    int axis_points = 51;
    double omega_max = 10.0;
    int omega_points = 401;
    HomConfig hom;
    TrajectoryConfig traj;

    int n_max_override = 0; ///< 0 = automatic cutoff
    double tail_tol = 1e-10;
    double rtol = 1e-10;
    std::uint64_t seed = 1;

    std::filesystem::path out_dir = "out";
    std::string stem = "run";
    bool emit_svg = false;
};

/// Parses and validates a configuration document. Unknown keys and missing
/// required keys are rejected with actionable messages. A sidecar document
/// (with a top-level "config" object) is accepted transparently, so a run
/// can be reproduced from its own provenance file.
inline ScenarioConfig parse_config(json doc) {
    if (doc.contains("config")) doc = doc.at("config");
    detail::reject_unknown(doc, "top-level",
                           {"params", "scenario", "numerics", "output"});
    require(doc.contains("params") && doc.contains("scenario"), errc::config_error,
            "config needs 'params' and 'scenario' sections");

    ScenarioConfig cfg;

    // --- params
    const json& jp = doc.at("params");
    detail::reject_unknown(jp, "params",
                           {"preset", "g", "kappa1", "kappa2", "kappa_s",
                            "gamma_par", "gamma_star", "delta", "a_in",
                            "rabi_over_gamma"});
    if (jp.contains("preset"))
        cfg.params = preset_by_name(jp.at("preset").get<std::string>());
    cfg.params.g = detail::get_or(jp, "g", cfg.params.g);
    cfg.params.kappa1 = detail::get_or(jp, "kappa1", cfg.params.kappa1);
    cfg.params.kappa2 = detail::get_or(jp, "kappa2", cfg.params.kappa2);
    cfg.params.kappa_s = detail::get_or(jp, "kappa_s", cfg.params.kappa_s);
    cfg.params.gamma_par = detail::get_or(jp, "gamma_par", cfg.params.gamma_par);
    cfg.params.gamma_star = detail::get_or(jp, "gamma_star", cfg.params.gamma_star);
    const double delta = detail::get_or(jp, "delta", 0.0);
    cfg.params.delta_c = delta;
    cfg.params.delta_qd = delta;
    require(!(jp.contains("a_in") && jp.contains("rabi_over_gamma")),
            errc::config_error, "give either 'a_in' or 'rabi_over_gamma', not both");
    if (jp.contains("rabi_over_gamma")) {
        cfg.rabi_over_gamma = jp.at("rabi_over_gamma").get<double>();
        cfg.params.a_in =
            cfg.params.a_in_for_rabi(cfg.rabi_over_gamma * cfg.params.gamma_par_enhanced());
    } else {
        cfg.params.a_in = detail::get_or(jp, "a_in", 0.0);
    }
    cfg.params.validate();

    // --- scenario
    const json& js = doc.at("scenario");
    detail::reject_unknown(js, "scenario",
                           {"kind", "field", "e_lo_ratio", "filter_transmission",
                            "tau_max", "tau_points", "irf_sigma", "axis_min",
                            "axis_max", "axis_points", "omega_max", "omega_points",
                            "hom", "traj"});
    require(js.contains("kind"), errc::config_error, "scenario needs a 'kind'");
    cfg.kind = js.at("kind").get<std::string>();
    const std::set<std::string> kinds = {"g2",          "sweep-lo",    "sweep-detuning",
                                         "sweep-power", "sweep-filter", "spectrum",
                                         "hom",         "traj"};
    require(kinds.count(cfg.kind) != 0, errc::config_error,
            "unknown scenario kind '" + cfg.kind + "'");
    cfg.field = detail::get_or<std::string>(js, "field", "reflected");
    cfg.e_lo_ratio = detail::get_or(js, "e_lo_ratio", 1.0);
    cfg.filter_transmission = detail::get_or(js, "filter_transmission", 0.0);
    cfg.tau_max = detail::get_or(js, "tau_max", 2.0);
    cfg.tau_points = detail::get_or(js, "tau_points", 801);
    cfg.irf_sigma = detail::get_or(js, "irf_sigma", 0.0);
    cfg.axis_min = detail::get_or(js, "axis_min", 0.0);
    cfg.axis_max = detail::get_or(js, "axis_max", 1.0);
    cfg.axis_points = detail::get_or(js, "axis_points", 51);
    cfg.omega_max = detail::get_or(js, "omega_max", 10.0);
    cfg.omega_points = detail::get_or(js, "omega_points", 401);
    require(cfg.tau_points >= 2 && cfg.axis_points >= 2 && cfg.omega_points >= 2,
            errc::config_error, "grids need at least two points");
    if (js.contains("hom")) {
        const json& jh = js.at("hom");
        detail::reject_unknown(jh, "scenario.hom",
                               {"r_a", "t_a", "r_b", "t_b", "delta_t", "v0"});
        cfg.hom.r_a = detail::get_or(jh, "r_a", 0.5);
        cfg.hom.t_a = detail::get_or(jh, "t_a", 0.5);
        cfg.hom.r_b = detail::get_or(jh, "r_b", 0.5);
        cfg.hom.t_b = detail::get_or(jh, "t_b", 0.5);
        cfg.hom.delta_t = detail::get_or(jh, "delta_t", 2.0);
        cfg.hom.v0 = detail::get_or(jh, "v0", 1.0);
        cfg.hom.validate();
    }
    if (js.contains("traj")) {
        const json& jt = js.at("traj");
        detail::reject_unknown(jt, "scenario.traj",
                               {"n_traj", "t_end", "dt_max", "burn_in"});
        cfg.traj.n_traj = detail::get_or(jt, "n_traj", 1000);
        cfg.traj.t_end = detail::get_or(jt, "t_end", 10.0);
        cfg.traj.dt_max = detail::get_or(jt, "dt_max", 0.05);
        cfg.traj.burn_in = detail::get_or(jt, "burn_in", 0.2);
    }

    // --- numerics
    if (doc.contains("numerics")) {
        const json& jn = doc.at("numerics");
        detail::reject_unknown(jn, "numerics", {"n_max", "tail_tol", "rtol", "seed"});
        cfg.n_max_override = detail::get_or(jn, "n_max", 0);
        cfg.tail_tol = detail::get_or(jn, "tail_tol", 1e-10);
        cfg.rtol = detail::get_or(jn, "rtol", 1e-10);
        cfg.seed = detail::get_or<std::uint64_t>(jn, "seed", 1);
    }
    cfg.traj.seed = cfg.seed;

    // --- output
    if (doc.contains("output")) {
        const json& jo = doc.at("output");
        detail::reject_unknown(jo, "output", {"dir", "stem", "formats"});
        cfg.out_dir = detail::get_or<std::string>(jo, "dir", "out");
        cfg.stem = detail::get_or<std::string>(jo, "stem", "run");
        if (jo.contains("formats"))
            for (const auto& f : jo.at("formats")) {
                const std::string fmt = f.get<std::string>();
                require(fmt == "csv" || fmt == "svg", errc::config_error,
                        "unknown output format '" + fmt + "'");
                if (fmt == "svg") cfg.emit_svg = true;
            }
    }

    cfg.doc = std::move(doc);
    return cfg;
}

// ---------------------------------------------------------------------------
// Scenario runners
// ---------------------------------------------------------------------------

struct RunArtifacts {
    std::filesystem::path csv;
    std::filesystem::path sidecar;
    json summary;
};

namespace detail {

inline int resolve_cutoff(const ScenarioConfig& cfg) {
    if (cfg.n_max_override > 0) return cfg.n_max_override;
    return choose_cutoff(cfg.params, cfg.tail_tol);
}

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    return v;
}

inline DetectionField field_from_config(const ScenarioConfig& cfg,
                                        const SystemParams& p) {
    const FieldKind kind = field_kind_by_name(cfg.field);
    double extra = 0.0;
    if (kind == FieldKind::sl) extra = cfg.e_lo_ratio * p.a_in;
    if (kind == FieldKind::filtered) extra = cfg.filter_transmission;
    return make_field(kind, p, extra);
}

inline json provenance(const ScenarioConfig& cfg, int n_max_used,
                       const json& extra = json::object()) {
    json prov{{"tool", "cqedsim"},
              {"version", cqed::version},
              {"seed", cfg.seed},
              {"n_max_used", n_max_used},
              {"rtol", cfg.rtol}};
    for (const auto& [k, v] : extra.items()) prov[k] = v;
    return prov;
}

inline RunArtifacts emit(const ScenarioConfig& cfg, const Table& table,
                         int n_max_used, const json& extra = json::object(),
                         std::size_t svg_ycol = 1, bool svg_logy = false) {
    std::filesystem::create_directories(cfg.out_dir);
    RunArtifacts art;
    art.csv = cfg.out_dir / (cfg.stem + ".csv");
    art.sidecar = cfg.out_dir / (cfg.stem + ".json");
    write_csv(art.csv, table);
    json sidecar{{"config", cfg.doc}, {"provenance", provenance(cfg, n_max_used, extra)}};
    write_json(art.sidecar, sidecar);
    if (cfg.emit_svg)
        write_svg_plot(cfg.out_dir / (cfg.stem + ".svg"), table, 0, svg_ycol, svg_logy);
    art.summary = sidecar["provenance"];
    return art;
}

} // namespace detail

inline RunArtifacts run_g2(const ScenarioConfig& cfg) {
    const int n_max = detail::resolve_cutoff(cfg);
    const CompositeSpace space(n_max);
    const Liouvillian L(cfg.params, space);
    const DensityMatrix rho = steady_state(L);
    const DetectionField f = detail::field_from_config(cfg, cfg.params);
    const auto taus = detail::linspace(0.0, cfg.tau_max, cfg.tau_points);
    const CorrelationTrace trace = g2(L, rho, f, taus);

    Table table;
    table.columns = {"tau_ns", "g2"};
    std::optional<CorrelationTrace> smeared;
    if (cfg.irf_sigma > 0.0) {
        table.columns.push_back("g2_irf");
        smeared = convolve_irf(trace, cfg.irf_sigma);
    }
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (smeared)
            table.rows.push_back({taus[i], trace.real_at(i), smeared->real_at(i)});
        else
            table.rows.push_back({taus[i], trace.real_at(i)});
    }
    const double residual = L.apply(rho.rho).cwiseAbs().maxCoeff();
    return detail::emit(cfg, table, n_max,
                        json{{"flux_photons_per_ns", trace.flux},
                             {"g2_zero", trace.real_at(0)},
                             {"steady_state_residual", residual},
                             {"field", f.label}},
                        1, false);
}

inline RunArtifacts run_sweep(const ScenarioConfig& cfg) {
    const SystemParams& p = cfg.params;
    SweepResult sweep;
    int n_max = 0;
    if (cfg.kind == "sweep-lo") {
        n_max = detail::resolve_cutoff(cfg);
        sweep = sweep_lo(p, detail::linspace(cfg.axis_min, cfg.axis_max, cfg.axis_points),
                         n_max);
    } else if (cfg.kind == "sweep-detuning") {
        n_max = detail::resolve_cutoff(cfg);
        sweep = sweep_detuning(
            p, detail::linspace(cfg.axis_min, cfg.axis_max, cfg.axis_points),
            field_kind_by_name(cfg.field), n_max);
    } else if (cfg.kind == "sweep-power") {
        // strongest drive bounds the cutoff for the whole grid
        if (cfg.n_max_override > 0) {
            n_max = cfg.n_max_override;
        } else {
            const SystemParams strongest =
                p.with_rabi(cfg.axis_max * p.gamma_par_enhanced());
            n_max = choose_cutoff(strongest, cfg.tail_tol);
        }
        sweep = sweep_power(p, detail::linspace(cfg.axis_min, cfg.axis_max,
                                                cfg.axis_points),
                            field_kind_by_name(cfg.field), n_max);
    } else if (cfg.kind == "sweep-filter") {
        n_max = detail::resolve_cutoff(cfg);
        sweep = sweep_filter(
            p, detail::linspace(cfg.axis_min, cfg.axis_max, cfg.axis_points), n_max);
    } else {
        fail(errc::config_error, "not a sweep kind: " + cfg.kind);
    }

    Table table;
    table.columns = {sweep.axis_label, "g2_zero", "flux_photons_per_ns"};
    const bool has_rt = !sweep.reflectivity.empty();
    if (has_rt) {
        table.columns.push_back("reflectivity");
        table.columns.push_back("transmissivity");
    }
    for (std::size_t i = 0; i < sweep.axis.size(); ++i) {
        std::vector<double> row{sweep.axis[i], sweep.g2_zero[i], sweep.flux[i]};
        if (has_rt) {
            row.push_back(sweep.reflectivity[i]);
            row.push_back(sweep.transmissivity[i]);
        }
        table.rows.push_back(std::move(row));
    }
    return detail::emit(cfg, table, n_max, json{{"field", cfg.field}}, 1, true);
}

inline RunArtifacts run_spectrum(const ScenarioConfig& cfg) {
    const int n_max = detail::resolve_cutoff(cfg);
    const CompositeSpace space(n_max);
    const Liouvillian L(cfg.params, space);
    const DensityMatrix rho = steady_state(L);
    const DetectionField f = detail::field_from_config(cfg, cfg.params);
    const auto taus = detail::linspace(0.0, cfg.tau_max, cfg.tau_points);
    const CorrelationTrace trace = g1(L, rho, f, taus);
    const auto omegas =
        detail::linspace(-cfg.omega_max, cfg.omega_max, cfg.omega_points);
    const SpectrumTrace spec = spectrum(trace, omegas);

    Table table;
    table.columns = {"omega_2pi_GHz", "density"};
    double total = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        table.rows.push_back({omegas[i], spec.density[i]});
        if (i + 1 < omegas.size())
            total += 0.5 * (spec.density[i] + spec.density[i + 1]) *
                     (omegas[i + 1] - omegas[i]);
    }
    return detail::emit(cfg, table, n_max,
                        json{{"coherent_weight", spec.coherent_weight},
                             {"integrated_density", total},
                             {"field", f.label}},
                        1, false);
}

inline RunArtifacts run_hom(const ScenarioConfig& cfg) {
    const int n_max = detail::resolve_cutoff(cfg);
    const CompositeSpace space(n_max);
    const Liouvillian L(cfg.params, space);
    const DensityMatrix rho = steady_state(L);
    const DetectionField f = detail::field_from_config(cfg, cfg.params);
    // the input traces must cover tau +- delta_t
    const double cover = cfg.tau_max + cfg.hom.delta_t;
    const int pts = static_cast<int>(std::ceil(
        cover / std::max(cfg.tau_max, 1e-9) * (cfg.tau_points - 1))) + 1;
    const auto in_taus = detail::linspace(0.0, cover, pts);
    const CorrelationTrace g2_in = g2(L, rho, f, in_taus);
    const CorrelationTrace g1_in = g1(L, rho, f, in_taus);

    const auto taus = detail::linspace(0.0, cfg.tau_max, cfg.tau_points);
    const CorrelationTrace cross = g2_cross(g2_in, cfg.hom, taus);
    const CorrelationTrace par = g2_parallel(g2_in, g1_in, cfg.hom, taus);

    Table table;
    table.columns = {"tau_ns", "g2_cross", "g2_parallel", "visibility"};
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double c = cross.real_at(i);
        const double pl = par.real_at(i);
        table.rows.push_back({taus[i], c, pl, c > 0.0 ? (c - pl) / c : 0.0});
    }
    return detail::emit(cfg, table, n_max,
                        json{{"visibility_zero", visibility(cross, par, 0.0)},
                             {"field", f.label}},
                        3, false);
}

inline RunArtifacts run_traj(const ScenarioConfig& cfg) {
    const int n_max = detail::resolve_cutoff(cfg);
    const CompositeSpace space(n_max);
    const MomentEstimate est = run_trajectories(cfg.params, space, cfg.traj);
    const auto refl = g2_zero_from_moments(est, make_field(FieldKind::reflected, cfg.params));
    const auto trans =
        g2_zero_from_moments(est, make_field(FieldKind::transmitted, cfg.params));

    Table table;
    table.columns = {"quantity_index", "mean_re", "mean_im", "se_re", "se_im"};
    const MomentStat* stats[] = {&est.a, &est.n, &est.a2, &est.ada2,
                                 &est.n2, &est.pe, &est.sz};
    for (int i = 0; i < 7; ++i)
        table.rows.push_back({static_cast<double>(i), stats[i]->mean.real(),
                              stats[i]->mean.imag(), stats[i]->se_re,
                              stats[i]->se_im});
    return detail::emit(
        cfg, table, n_max,
        json{{"moment_order", "a, n, a2, ad_a2, ad2_a2, pe, sz"},
             {"g2_zero_reflected", {{"value", refl.value}, {"stderr", refl.stderr_}}},
             {"g2_zero_transmitted",
              {{"value", trans.value}, {"stderr", trans.stderr_}}},
             {"jump_rates_per_ns",
              {est.jump_rate[0], est.jump_rate[1], est.jump_rate[2]}},
             {"n_traj", est.n_traj}},
        1, false);
}

/// Dispatch on the scenario kind. The caller owns directory locking.
inline RunArtifacts run_scenario(const ScenarioConfig& cfg) {
    if (cfg.kind == "g2") return run_g2(cfg);
    if (cfg.kind.rfind("sweep-", 0) == 0) return run_sweep(cfg);
    if (cfg.kind == "spectrum") return run_spectrum(cfg);
    if (cfg.kind == "hom") return run_hom(cfg);
    if (cfg.kind == "traj") return run_traj(cfg);
    fail(errc::config_error, "unhandled scenario kind: " + cfg.kind);
}

} // namespace cqed
