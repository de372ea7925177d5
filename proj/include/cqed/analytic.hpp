#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "cqed/correlations.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/params.hpp"

namespace cqed {

// ---------------------------------------------------------------------------
// Semiclassical reflection/transmission of the driven cavity
// ---------------------------------------------------------------------------

/// Steady-state amplitude reflection coefficient with the emitter response
/// closed by a fixed <sigma_z>:
///   r = 1 - kappa1 Dqd / (Dqd Dc - g^2 <sigma_z>),
///   Dqd = i delta_qd + gamma_perp,  Dc = i delta_c + kappa/2.
/// The expression is a ratio of rate products, so it can be evaluated in
/// stored 2*pi*GHz units directly.
inline complexd reflection_coefficient(const SystemParams& p, double sigma_z_avg) {
    require(sigma_z_avg >= -1.0 && sigma_z_avg <= 0.0, errc::domain_error,
            "<sigma_z> must lie in [-1, 0]");
    const complexd dqd(p.gamma_perp(), p.delta_qd);
    const complexd dc(p.kappa() / 2.0, p.delta_c);
    const complexd den = dqd * dc - p.g * p.g * sigma_z_avg;
    return 1.0 - p.kappa1 * dqd / den;
}

/// Companion transmission coefficient, same closure.
inline complexd transmission_coefficient(const SystemParams& p, double sigma_z_avg) {
    require(sigma_z_avg >= -1.0 && sigma_z_avg <= 0.0, errc::domain_error,
            "<sigma_z> must lie in [-1, 0]");
    const complexd dqd(p.gamma_perp(), p.delta_qd);
    const complexd dc(p.kappa() / 2.0, p.delta_c);
    const complexd den = dqd * dc - p.g * p.g * sigma_z_avg;
    return -std::sqrt(p.kappa1 * p.kappa2) * dqd / den;
}

struct ReflectionTransmission {
    complexd r;
    complexd t;
};

/// Reflection/transmission from a master-equation steady state via the
/// input-output relation: r = 1 + sqrt(kappa1) Tr(rho a)/a_in,
/// t = sqrt(kappa2) Tr(rho a)/a_in.
inline ReflectionTransmission reflectivity_from_rho(const SystemParams& p,
                                                    const DensityMatrix& rho_ss,
                                                    const SpaceOps& ops) {
    require(p.a_in > 0.0, errc::undefined_ratio,
            "reflectivity from rho requires a nonzero drive");
    const complexd avg_a = (ops.a * rho_ss.rho).trace();
    return {1.0 + std::sqrt(rad_per_ns(p.kappa1)) * avg_a / p.a_in,
            std::sqrt(rad_per_ns(p.kappa2)) * avg_a / p.a_in};
}

// ---------------------------------------------------------------------------
// Dressed-emitter Bloch-equation family
// ---------------------------------------------------------------------------

/// Parameters of the cavity-enhanced two-level model. All in 2*pi*GHz;
/// detuning = omega_QD - omega_L.
struct BlochParams {
    double omega_rabi = 0.0;
    double gamma_par_enh = 0.0;
    double gamma_star = 0.0;
    double detuning = 0.0;

    void validate() const {
        require(gamma_par_enh > 0.0, errc::domain_error,
                "enhanced decay rate must be positive");
        require(omega_rabi >= 0.0 && gamma_star >= 0.0, errc::domain_error,
                "Rabi frequency and dephasing must be non-negative");
    }

    double gamma_t() const { return gamma_par_enh / 2.0 + gamma_star; }

    /// Saturation parameter S = Omega^2 (1/2 + gamma*/Gamma) /
    /// (detuning^2 + (Gamma/2 + gamma*)^2).
    double saturation() const {
        const double gt = gamma_t();
        return omega_rabi * omega_rabi * (0.5 + gamma_star / gamma_par_enh) /
               (detuning * detuning + gt * gt);
    }

    /// lambda = sqrt((Gamma - 2 gamma*)^2 / 16 - Omega^2); real on the
    /// low-drive branch.
    double lambda() const {
        const double d = gamma_par_enh - 2.0 * gamma_star;
        const double arg = d * d / 16.0 - omega_rabi * omega_rabi;
        require(arg >= 0.0, errc::domain_error,
                "closed forms require Omega < |Gamma - 2 gamma*| / 4");
        return std::sqrt(arg);
    }

    bool low_drive_branch() const {
        const double d = gamma_par_enh - 2.0 * gamma_star;
        return omega_rabi < std::abs(d) / 4.0;
    }
};

struct BlochState {
    double rho_gg = 1.0;
    double rho_ee = 0.0;
    complexd rho_ge{0.0, 0.0};
    complexd rho_eg{0.0, 0.0};
};

/// Steady state of the Bloch equations; rho_ee = (S/2)/(1+S).
inline BlochState bloch_steady(const BlochParams& p) {
    p.validate();
    const double s = p.saturation();
    BlochState st;
    st.rho_ee = 0.5 * s / (1.0 + s);
    st.rho_gg = 1.0 - st.rho_ee;
    const double w = st.rho_ee - st.rho_gg; // = -1/(1+S)
    const double gt = p.gamma_t();
    const double denom = gt * gt + p.detuning * p.detuning;
    // from [i detuning - gamma_t] rho_ge = i (Omega/2) w in steady state
    st.rho_ge = complexd(0.5 * p.omega_rabi * w * p.detuning / denom,
                         -0.5 * p.omega_rabi * w * gt / denom);
    st.rho_eg = std::conj(st.rho_ge);
    return st;
}

struct ScatteringRates {
    double i_coh;   ///< photons/ns
    double i_incoh; ///< photons/ns
};

/// Steady-state coherent and incoherent scattering rates.
inline ScatteringRates scattering_rates(const BlochParams& p) {
    p.validate();
    const double s = p.saturation();
    const double gp = p.gamma_par_enh;
    const double common = s / ((1.0 + s) * (1.0 + s)) / (gp + 2.0 * p.gamma_star);
    const double rate = rad_per_ns(gp);
    return {rate * gp * common,
            rate * (gp * s + 2.0 * p.gamma_star * (1.0 + s)) * common};
}

namespace detail {

inline void require_resonant_low_drive(const BlochParams& p) {
    p.validate();
    require(p.detuning == 0.0, errc::domain_error,
            "closed forms are derived at resonance (detuning = 0)");
    require(p.low_drive_branch(), errc::domain_error,
            "closed forms require Omega < |Gamma - 2 gamma*| / 4; use the "
            "master-equation path at higher drive");
}

/// The two lambda-paired incoherent terms of the first-order coherence,
/// combined so the lambda -> 0 degeneracy stays finite: for
/// q = Gamma/2 - gamma*, Gm = 3 Gamma/4 + gamma*/2 (rad/ns),
///   f(tau) = e^{-Gm tau} [ -(q+2L)^2 e^{L tau} / (16 L (Gm - L))
///                          +(q-2L)^2 e^{-L tau} / (16 L (Gm + L)) ].
inline double g1_lambda_pair(double q, double gm, double lam, double tau) {
    if (lam > 1e-6 * gm) {
        const double t3 =
            -(q + 2 * lam) * (q + 2 * lam) * std::exp(lam * tau) /
            (16.0 * lam * (gm - lam));
        const double t4 = (q - 2 * lam) * (q - 2 * lam) * std::exp(-lam * tau) /
                          (16.0 * lam * (gm + lam));
        return std::exp(-gm * tau) * (t3 + t4);
    }
    // series limit at the removable lambda = 0 singularity
    const double lead = -(4.0 * q * gm + q * q * tau * gm + q * q) / (8.0 * gm * gm);
    return std::exp(-gm * tau) * lead;
}

} // namespace detail

/// Closed-form first-order coherence of the reflected light on the low-drive
/// branch, in the frame rotating at the emitter transition. Real-valued at
/// resonance; g1(0) = 1 identically.
inline CorrelationTrace g1_closed_form(const BlochParams& p,
                                       const std::vector<double>& taus) {
    detail::require_resonant_low_drive(p);
    detail::check_tau_grid(taus);
    const double gp = rad_per_ns(p.gamma_par_enh);
    const double gs = rad_per_ns(p.gamma_star);
    const double om = rad_per_ns(p.omega_rabi);
    const double lam = rad_per_ns(p.lambda());
    const double coh = (gp / 2.0) / (gp / 2.0 + gs + om * om / gp);
    const double q = gp / 2.0 - gs;
    const double gm = 0.75 * gp + 0.5 * gs;

    CorrelationTrace out;
    out.taus = taus;
    out.values.reserve(taus.size());
    for (double tau : taus) {
        const double v = coh + 0.5 * std::exp(-(gp / 2.0 + gs) * tau) +
                         detail::g1_lambda_pair(q, gm, lam, tau);
        out.values.emplace_back(v, 0.0);
    }
    out.flux = 0.0;
    out.field.label = "bloch-closed-form";
    return out;
}

/// Closed-form emission spectrum: delta weight plus the Lorentzian
/// combination, on a frequency grid relative to the transition (2*pi*GHz).
inline SpectrumTrace spectrum_closed_form(const BlochParams& p,
                                          const std::vector<double>& omegas) {
    detail::require_resonant_low_drive(p);
    // evaluated in 2*pi*GHz units throughout: the density then integrates to
    // the incoherent weight on a 2*pi*GHz grid.
    const double gp = p.gamma_par_enh;
    const double gs = p.gamma_star;
    const double om = p.omega_rabi;
    const double lam = p.lambda();
    const double gt = gp / 2.0 + gs;
    const double q = gp / 2.0 - gs;
    const double gm = 0.75 * gp + 0.5 * gs;

    SpectrumTrace out;
    out.omegas = omegas;
    out.coherent_weight = (gp / 2.0) / (gp / 2.0 + gs + om * om / gp);
    out.density.resize(omegas.size());
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        double dens = (gt / (2.0 * pi)) / (w * w + gt * gt);
        if (lam > 1e-6 * gm) {
            dens -= (q + 2 * lam) * (q + 2 * lam) /
                    (16.0 * pi * lam * (w * w + (gm - lam) * (gm - lam)));
            dens += (q - 2 * lam) * (q - 2 * lam) /
                    (16.0 * pi * lam * (w * w + (gm + lam) * (gm + lam)));
        } else {
            // lambda -> 0 limit of the paired terms
            const double d2 = w * w + gm * gm;
            dens -= (2.0 * q * d2 + q * q * gm) / (4.0 * pi * d2 * d2);
        }
        out.density[i] = dens;
    }
    return out;
}

/// Closed-form second-order coherence: g2(0) = 0, monotone recovery to 1 on
/// the low-drive branch.
inline CorrelationTrace g2_closed_form(const BlochParams& p,
                                       const std::vector<double>& taus) {
    detail::require_resonant_low_drive(p);
    detail::check_tau_grid(taus);
    const double lam = rad_per_ns(p.lambda());
    const double gm = rad_per_ns(0.75 * p.gamma_par_enh + 0.5 * p.gamma_star);

    CorrelationTrace out;
    out.taus = taus;
    out.values.reserve(taus.size());
    for (double tau : taus) {
        const double x = lam * tau;
        // sinh(x)/lambda with a series fallback near the degeneracy
        const double sinh_over_lam =
            (std::abs(x) < 1e-4) ? tau * (1.0 + x * x / 6.0 + x * x * x * x / 120.0)
                                 : std::sinh(x) / lam;
        const double v =
            1.0 - (std::cosh(x) + gm * sinh_over_lam) * std::exp(-gm * tau);
        out.values.emplace_back(std::max(v, 0.0), 0.0);
    }
    out.flux = 0.0;
    out.field.label = "bloch-closed-form";
    return out;
}

/// Numerical integration of the four coupled Bloch equations.
inline std::vector<BlochState> bloch_integrate(const BlochParams& p,
                                               const BlochState& s0,
                                               const std::vector<double>& times) {
    p.validate();
    require(!times.empty(), errc::domain_error, "empty time grid");
    const double gp = rad_per_ns(p.gamma_par_enh);
    const double gs = rad_per_ns(p.gamma_star);
    const double om = rad_per_ns(p.omega_rabi);
    const double det = rad_per_ns(p.detuning);
    const complexd i1(0.0, 1.0);

    using Vec = Eigen::Vector4cd; // (rho_gg, rho_ee, rho_ge, rho_eg)
    const auto rhs = [&](const Vec& y) {
        Vec d;
        const complexd diff = y(2) - y(3); // rho_ge - rho_eg
        d(0) = i1 * (om / 2.0) * diff + gp * y(1);
        d(1) = -i1 * (om / 2.0) * diff - gp * y(1);
        d(2) = (i1 * det - (gp / 2.0 + gs)) * y(2) -
               i1 * (om / 2.0) * (y(1) - y(0));
        d(3) = (-i1 * det - (gp / 2.0 + gs)) * y(3) +
               i1 * (om / 2.0) * (y(1) - y(0));
        return d;
    };

    Vec y;
    y << complexd(s0.rho_gg, 0.0), complexd(s0.rho_ee, 0.0), s0.rho_ge, s0.rho_eg;
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    std::vector<BlochState> out;
    out.reserve(times.size());
    double t = times.front() > 0.0 ? 0.0 : times.front();
    for (double target : times) {
        if (target > t) {
            integrate_dp54(rhs, y, t, target, opt);
            t = target;
        }
        BlochState st;
        st.rho_gg = y(0).real();
        st.rho_ee = y(1).real();
        st.rho_ge = y(2);
        st.rho_eg = y(3);
        out.push_back(st);
    }
    return out;
}

} // namespace cqed
