#pragma once

#include <cmath>
#include <iostream>
#include <vector>

#include "cqed/correlations.hpp"
#include "cqed/errors.hpp"

namespace cqed {

/// Asymmetric Mach-Zehnder configuration: beam-splitter intensity
/// coefficients, path delay and wave-packet overlap.
struct HomConfig {
    double r_a = 0.5, t_a = 0.5;
    double r_b = 0.5, t_b = 0.5;
    double delta_t = 2.0; ///< ns
    double v0 = 1.0;      ///< wave-packet overlap in [0, 1]

    void validate() const {
        require(std::abs(r_a + t_a - 1.0) <= 1e-12 &&
                    std::abs(r_b + t_b - 1.0) <= 1e-12,
                errc::domain_error, "beam-splitter coefficients must sum to 1");
        require(r_a >= 0 && r_a <= 1 && r_b >= 0 && r_b <= 1, errc::domain_error,
                "beam-splitter coefficients must lie in [0, 1]");
        require(v0 >= 0.0 && v0 <= 1.0, errc::domain_error,
                "wave-packet overlap must lie in [0, 1]");
    }

    double norm() const {
        return (r_a * r_a + t_a * t_a) * r_b * t_b +
               (r_b * r_b + t_b * t_b) * r_a * t_a;
    }
};

namespace detail {

inline double g2_input(const CorrelationTrace& g2, double tau, bool* warned) {
    if (std::abs(tau) > g2.taus.back() && warned && !*warned) {
        std::cerr << "hom: correlation trace extrapolated to 1 beyond tau = "
                  << g2.taus.back() << " ns\n";
        *warned = true;
    }
    return g2.at(tau).real();
}

} // namespace detail

/// Cross-polarised output correlations of the interferometer: delayed copies
/// of the input g2 weighted by the splitter coefficients.
inline CorrelationTrace g2_cross(const CorrelationTrace& g2_in, const HomConfig& cfg,
                                 const std::vector<double>& taus) {
    cfg.validate();
    const double n = cfg.norm();
    require(n > 0.0, errc::degenerate_splitter,
            "beam-splitter configuration has zero coincidence weight");
    bool warned = false;
    CorrelationTrace out;
    out.taus = taus;
    out.values.reserve(taus.size());
    out.field.label = "hom-cross";
    for (double tau : taus) {
        const double v =
            ((cfg.r_a * cfg.r_a + cfg.t_a * cfg.t_a) * cfg.r_b * cfg.t_b *
                 detail::g2_input(g2_in, tau, &warned) +
             cfg.r_b * cfg.r_b * cfg.r_a * cfg.t_a *
                 detail::g2_input(g2_in, tau + cfg.delta_t, &warned) +
             cfg.t_b * cfg.t_b * cfg.r_a * cfg.t_a *
                 detail::g2_input(g2_in, tau - cfg.delta_t, &warned)) /
            n;
        out.values.emplace_back(v, 0.0);
    }
    return out;
}

/// Parallel-polarised output correlations: the cross expression minus the
/// classical two-photon interference term 2 R_A T_A R_B T_B V0 |g1(tau)|^2.
inline CorrelationTrace g2_parallel(const CorrelationTrace& g2_in,
                                    const CorrelationTrace& g1_in,
                                    const HomConfig& cfg,
                                    const std::vector<double>& taus) {
    cfg.validate();
    require(g1_in.taus == g2_in.taus, errc::alignment_error,
            "g1 and g2 traces must share the same delay grid");
    CorrelationTrace out = g2_cross(g2_in, cfg, taus);
    out.field.label = "hom-parallel";
    const double n = cfg.norm();
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double g1m = std::abs(g1_in.at(taus[i]));
        double v = out.values[i].real() -
                   2.0 * cfg.r_a * cfg.t_a * cfg.r_b * cfg.t_b * cfg.v0 * g1m *
                       g1m / n;
        require(v >= -1e-9, errc::solver_failure,
                "parallel correlation negative beyond tolerance");
        out.values[i] = complexd(std::max(v, 0.0), 0.0);
    }
    return out;
}

/// Two-photon interference visibility V = (g2_cross - g2_parallel)/g2_cross
/// at a single delay.
inline double visibility(const CorrelationTrace& cross,
                         const CorrelationTrace& parallel, double tau) {
    require(cross.taus == parallel.taus, errc::alignment_error,
            "cross and parallel traces must share the same delay grid");
    const double c = cross.at(tau).real();
    require(c > 0.0, errc::undefined_visibility,
            "cross correlation vanishes at the requested delay");
    return (c - parallel.at(tau).real()) / c;
}

/// Intensity-weighted first-order coherence of a coherent/incoherent
/// mixture with no mutual coherence.
inline CorrelationTrace g1_mixture(double i_coh, double i_incoh,
                                   const CorrelationTrace& g1_laser,
                                   const CorrelationTrace& g1_incoherent) {
    require(i_coh >= 0.0 && i_incoh >= 0.0 && (i_coh + i_incoh) > 0.0,
            errc::domain_error, "mixture intensities must be non-negative");
    require(g1_laser.taus == g1_incoherent.taus, errc::alignment_error,
            "mixture traces must share the same delay grid");
    const double tot = i_coh + i_incoh;
    CorrelationTrace out = g1_laser;
    out.field.label = "g1-mixture";
    out.flux = tot;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (i_coh * g1_laser.values[i] +
                         i_incoh * g1_incoherent.values[i]) /
                        tot;
    return out;
}

} // namespace cqed
