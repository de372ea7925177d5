#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/correlations.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/parallel.hpp"
#include "cqed/params.hpp"

namespace cqed {

enum class FieldKind { sl, reflected, transmitted, filtered };

inline FieldKind field_kind_by_name(const std::string& name) {
    if (name == "sl") return FieldKind::sl;
    if (name == "reflected") return FieldKind::reflected;
    if (name == "transmitted") return FieldKind::transmitted;
    if (name == "filtered") return FieldKind::filtered;
    fail(errc::config_error, "unknown field kind '" + name +
                                 "' (expected sl | reflected | transmitted | filtered)");
}

/// Detection-field variants:
///   SL          O = E_LO + sqrt(kappa2) a      (extra = E_LO)
///   reflected   O = a_in + sqrt(kappa1) a
///   transmitted O = sqrt(kappa2) a
///   filtered    O = sqrt(1-T_F) a_in + sqrt(kappa1) a   (extra = T_F)
inline DetectionField make_field(FieldKind kind, const SystemParams& p,
                                 double extra = 0.0) {
    p.validate();
    DetectionField f;
    switch (kind) {
        case FieldKind::sl:
            f.offset = extra;
            f.cavity_weight = std::sqrt(rad_per_ns(p.kappa2));
            f.label = "SL";
            break;
        case FieldKind::reflected:
            f.offset = p.a_in;
            f.cavity_weight = std::sqrt(rad_per_ns(p.kappa1));
            f.label = "reflected";
            break;
        case FieldKind::transmitted:
            f.offset = 0.0;
            f.cavity_weight = std::sqrt(rad_per_ns(p.kappa2));
            f.label = "transmitted";
            break;
        case FieldKind::filtered:
            require(extra >= 0.0 && extra <= 1.0, errc::invalid_filter,
                    "filter transmission must lie in [0, 1]");
            f.offset = std::sqrt(1.0 - extra) * p.a_in;
            f.cavity_weight = std::sqrt(rad_per_ns(p.kappa1));
            f.label = "filtered";
            break;
    }
    return f;
}

/// Equal-time second-order coherence from steady-state moments:
/// g2(0) = <O^dag O^dag O O> / <O^dag O>^2.
inline double g2_zero(const DetectionField& field, const DensityMatrix& rho,
                      const SpaceOps& ops) {
    field.validate();
    const Matrix o = field.matrix(ops);
    const Matrix od = o.adjoint();
    const double f = (od * o * rho.rho).trace().real();
    require(f > 1e-14, errc::undefined_normalization, "flux too small for g2(0)");
    const double n = (od * od * o * o * rho.rho).trace().real();
    return std::max(n, 0.0) / (f * f);
}

/// One sweep of an interference scan: the swept axis plus per-point photon
/// statistics, fluxes and (when meaningful) channel coefficients.
struct SweepResult {
    std::string axis_label;
    std::vector<double> axis;
    std::vector<double> g2_zero;
    std::vector<double> flux;                 ///< photons/ns
    std::vector<double> reflectivity;         ///< |r|^2, empty if n/a
    std::vector<double> transmissivity;       ///< |t|^2, empty if n/a
    SystemParams params;
};

/// g2(0) of the superimposed field versus E_LO / a_in at fixed drive. One
/// steady state serves every ratio.
inline SweepResult sweep_lo(const SystemParams& p, const std::vector<double>& ratios,
                            int n_max) {
    p.validate();
    require(p.a_in > 0.0, errc::domain_error, "LO sweep requires a nonzero drive");
    const CompositeSpace space(n_max);
    const Liouvillian L(p, space);
    const DensityMatrix rho = steady_state(L);
    const SpaceOps& ops = L.ops();

    SweepResult out;
    out.axis_label = "lo_ratio";
    out.axis = ratios;
    out.params = p;
    out.g2_zero.resize(ratios.size());
    out.flux.resize(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const DetectionField f = make_field(FieldKind::sl, p, ratios[i] * p.a_in);
        out.g2_zero[i] = g2_zero(f, rho, ops);
        out.flux[i] = flux(f, rho, ops);
    }
    return out;
}

/// g2(0) and channel coefficients versus drive detuning (delta_c and
/// delta_qd move together: the drive is scanned across the joint resonance).
inline SweepResult sweep_detuning(const SystemParams& p,
                                  const std::vector<double>& deltas, FieldKind kind,
                                  int n_max) {
    p.validate();
    const CompositeSpace space(n_max);
    SweepResult out;
    out.axis_label = "detuning_2pi_GHz";
    out.axis = deltas;
    out.params = p;
    out.g2_zero.resize(deltas.size());
    out.flux.resize(deltas.size());
    out.reflectivity.resize(deltas.size());
    out.transmissivity.resize(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) {
        const SystemParams pi = p.with_detuning(deltas[i]);
        const Liouvillian L(pi, space);
        const DensityMatrix rho = steady_state(L);
        const DetectionField f = make_field(kind, pi, kind == FieldKind::sl
                                                          ? pi.a_in
                                                          : 0.0);
        out.g2_zero[i] = g2_zero(f, rho, L.ops());
        out.flux[i] = flux(f, rho, L.ops());
        const auto rt = reflectivity_from_rho(pi, rho, L.ops());
        out.reflectivity[i] = std::norm(rt.r);
        out.transmissivity[i] = std::norm(rt.t);
    });
    return out;
}

/// g2(0), flux and channel coefficients versus drive strength Omega/Gamma.
inline SweepResult sweep_power(const SystemParams& p,
                               const std::vector<double>& omega_ratios,
                               FieldKind kind, int n_max) {
    p.validate();
    SweepResult out;
    out.axis_label = "omega_over_gamma";
    out.axis = omega_ratios;
    out.params = p;
    const std::size_t n = omega_ratios.size();
    out.g2_zero.resize(n);
    out.flux.resize(n);
    out.reflectivity.resize(n);
    out.transmissivity.resize(n);
    const CompositeSpace space(n_max);
    parallel_for(n, [&](std::size_t i) {
        const SystemParams pi =
            p.with_rabi(omega_ratios[i] * p.gamma_par_enhanced());
        const Liouvillian L(pi, space);
        const DensityMatrix rho = steady_state(L);
        const double tail = fock_tail_population(rho);
        require(tail < 1e-6, errc::cutoff_overflow,
                "Fock cutoff too small at Omega/Gamma = " +
                    std::to_string(omega_ratios[i]));
        const DetectionField f = make_field(kind, pi, kind == FieldKind::sl
                                                          ? pi.a_in
                                                          : 0.0);
        out.g2_zero[i] = g2_zero(f, rho, L.ops());
        out.flux[i] = flux(f, rho, L.ops());
        const auto rt = reflectivity_from_rho(pi, rho, L.ops());
        out.reflectivity[i] = std::norm(rt.r);
        out.transmissivity[i] = std::norm(rt.t);
    });
    return out;
}

/// g2(0) of the filtered field versus the filter transmission T_F. One
/// steady state serves every filter setting.
inline SweepResult sweep_filter(const SystemParams& p,
                                const std::vector<double>& tf_grid, int n_max) {
    p.validate();
    require(p.a_in > 0.0, errc::domain_error, "filter sweep requires a drive");
    for (double tf : tf_grid)
        require(tf >= 0.0 && tf <= 1.0, errc::invalid_filter,
                "filter transmission outside [0, 1]");
    const CompositeSpace space(n_max);
    const Liouvillian L(p, space);
    const DensityMatrix rho = steady_state(L);

    SweepResult out;
    out.axis_label = "filter_transmission";
    out.axis = tf_grid;
    out.params = p;
    out.g2_zero.resize(tf_grid.size());
    out.flux.resize(tf_grid.size());
    for (std::size_t i = 0; i < tf_grid.size(); ++i) {
        const DetectionField f = make_field(FieldKind::filtered, p, tf_grid[i]);
        out.g2_zero[i] = g2_zero(f, rho, L.ops());
        out.flux[i] = flux(f, rho, L.ops());
    }
    return out;
}

/// Truncated two-photon picture of the superimposed light: a coherent
/// one-photon amplitude alpha on top of an incoherent two-photon amplitude
/// -xi/sqrt(2), alpha^2 = E_LO^2/Gamma, xi = a_in^2/Gamma.
struct TwoPhotonToyState {
    double alpha = 0.0;
    double xi = 0.0;

    void validate() const {
        require(alpha >= 0.0 && xi >= 0.0, errc::domain_error,
                "toy-state amplitudes must be non-negative");
    }

    bool weak_regime() const { return alpha * alpha + xi <= 0.2; }
};

/// g2(0) of the normalised truncated state with amplitudes
/// c0 = 1, c1 = alpha, c2 = (alpha^2 - xi)/sqrt(2); exactly zero when
/// alpha^2 = xi.
inline double toy_g2_zero(const TwoPhotonToyState& t) {
    t.validate();
    const double c1 = t.alpha;
    const double c2 = (t.alpha * t.alpha - t.xi) / std::sqrt(2.0);
    const double norm2 = 1.0 + c1 * c1 + c2 * c2;
    require(c1 > 0.0 || c2 != 0.0, errc::undefined_normalization,
            "toy state carries no photons");
    const double n1 = c1 * c1 / norm2;
    const double n2 = c2 * c2 / norm2;
    return 2.0 * n2 / ((n1 + 2.0 * n2) * (n1 + 2.0 * n2));
}

} // namespace cqed
