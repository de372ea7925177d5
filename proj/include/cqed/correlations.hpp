#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

/// Affine detection-field observable O = c + s * a. The offset c is in
/// sqrt(photons/ns); the cavity weight s in sqrt(1/ns), so that <O^dag O>
/// is a photon flux.
struct DetectionField {
    complexd offset{0.0, 0.0};
    complexd cavity_weight{0.0, 0.0};
    std::string label = "custom";

    void validate() const {
        require(std::abs(offset) > 0.0 || std::abs(cavity_weight) > 0.0,
                errc::domain_error, "detection field must have a nonzero component");
    }

    /// Dense matrix c*I + s*a on the composite space of `ops`.
    Matrix matrix(const SpaceOps& ops) const {
        return offset * Matrix::Identity(ops.space.dim(), ops.space.dim()) +
               cavity_weight * ops.a;
    }
};

/// Sampled two-time correlation. `values` holds g1 (complex) or g2
/// (real, stored in the real part).
struct CorrelationTrace {
    std::vector<double> taus;             ///< ns, ascending, taus[0] == 0
    std::vector<complexd> values;
    double flux = 0.0;                    ///< <O^dag O>, photons/ns
    DetectionField field;

    double real_at(std::size_t i) const { return values[i].real(); }

    /// Linear interpolation of |values| mirrored onto tau < 0
    /// (stationary field: g2(-t) = g2(t), g1(-t) = conj(g1(t))).
    complexd at(double tau) const {
        const bool mirror = tau < 0.0;
        double t = std::abs(tau);
        if (t >= taus.back()) {
            complexd v = values.back();
            return mirror ? std::conj(v) : v;
        }
        const auto it = std::upper_bound(taus.begin(), taus.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - taus.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - taus[lo]) / (taus[hi] - taus[lo]);
        const complexd v = (1.0 - w) * values[lo] + w * values[hi];
        return mirror ? std::conj(v) : v;
    }
};

/// Emission spectrum: coherent delta-peak weight reported separately from
/// the rasterised continuum density (frequencies relative to the drive).
struct SpectrumTrace {
    std::vector<double> omegas;   ///< 2*pi*GHz
    std::vector<double> density;  ///< per 2*pi*GHz
    double coherent_weight = 0.0;
};

/// <O^dag O> on a state, photons/ns.
inline double flux(const DetectionField& field, const DensityMatrix& rho,
                   const SpaceOps& ops) {
    field.validate();
    const Matrix o = field.matrix(ops);
    return (o.adjoint() * o * rho.rho).trace().real();
}

namespace detail {

inline void check_tau_grid(const std::vector<double>& taus) {
    require(!taus.empty() && taus.front() == 0.0, errc::domain_error,
            "tau grid must start at 0");
    for (std::size_t i = 1; i < taus.size(); ++i)
        require(taus[i] > taus[i - 1], errc::domain_error, "tau grid must ascend");
}

/// Propagates X under L, recording Tr(obs * X) at each grid point.
inline std::vector<complexd> regression_trace(const Liouvillian& L, Matrix x,
                                              const Matrix& obs,
                                              const std::vector<double>& taus,
                                              double rtol = 1e-10) {
    std::vector<complexd> out;
    out.reserve(taus.size());
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2 * std::max(1.0, x.cwiseAbs().maxCoeff());
    const auto rhs = [&L](const Matrix& m) { return L.apply(m); };
    double t = 0.0;
    for (double target : taus) {
        if (target > t) {
            integrate_dp54(rhs, x, t, target, opt);
            t = target;
        }
        out.push_back((obs * x).trace());
    }
    return out;
}

} // namespace detail

/// First-order coherence by quantum regression:
/// g1(tau) = Tr[O^dag exp(L tau)(O rho_ss)] / <O^dag O>.
inline CorrelationTrace g1(const Liouvillian& L, const DensityMatrix& rho_ss,
                           const DetectionField& field,
                           const std::vector<double>& taus) {
    detail::check_tau_grid(taus);
    field.validate();
    const SpaceOps& ops = L.ops();
    const Matrix o = field.matrix(ops);
    const double f = (o.adjoint() * o * rho_ss.rho).trace().real();
    require(f > 1e-14, errc::undefined_normalization,
            "flux too small to normalise g1");
    auto vals = detail::regression_trace(L, o * rho_ss.rho, o.adjoint(), taus);
    for (auto& v : vals) v /= f;
    CorrelationTrace trace{taus, std::move(vals), f, field};
    return trace;
}

/// Second-order coherence by quantum regression:
/// g2(tau) = Tr[(O^dag O) exp(L tau)(O rho_ss O^dag)] / <O^dag O>^2.
inline CorrelationTrace g2(const Liouvillian& L, const DensityMatrix& rho_ss,
                           const DetectionField& field,
                           const std::vector<double>& taus) {
    detail::check_tau_grid(taus);
    field.validate();
    const SpaceOps& ops = L.ops();
    const Matrix o = field.matrix(ops);
    const double f = (o.adjoint() * o * rho_ss.rho).trace().real();
    require(f > 1e-14, errc::undefined_normalization,
            "flux too small to normalise g2");
    auto vals =
        detail::regression_trace(L, o * rho_ss.rho * o.adjoint(), o.adjoint() * o, taus);
    const double f2 = f * f;
    for (auto& v : vals) {
        v /= f2;
        require(std::abs(v.imag()) <= 1e-9 * std::max(1.0, std::abs(v.real())),
                errc::solver_failure, "g2 acquired an imaginary part");
        require(v.real() >= -1e-9, errc::solver_failure,
                "g2 sample below zero beyond tolerance");
        v = complexd(std::max(v.real(), 0.0), 0.0);
    }
    CorrelationTrace trace{taus, std::move(vals), f, field};
    return trace;
}

/// Coherent/continuum split of the emission spectrum from a g1 trace.
/// The connected remainder is Fourier-transformed with an analytically
/// extended exponential tail; the coherent fraction is reported as a scalar
/// delta weight, never rasterised.
inline SpectrumTrace spectrum(const CorrelationTrace& g1_trace,
                              const std::vector<double>& omegas,
                              double decay_tol = 1e-6) {
    require(g1_trace.taus.size() >= 16, errc::domain_error,
            "g1 trace too short for a spectrum");
    const std::size_t n = g1_trace.taus.size();

    // Coherent weight = long-delay limit of g1; average the last few samples
    // to suppress residual transients.
    complexd coh(0.0, 0.0);
    const std::size_t navg = std::max<std::size_t>(4, n / 64);
    for (std::size_t i = n - navg; i < n; ++i) coh += g1_trace.values[i];
    coh /= static_cast<double>(navg);

    std::vector<complexd> conn(n);
    for (std::size_t i = 0; i < n; ++i) conn[i] = g1_trace.values[i] - coh;

    const double residual = std::abs(conn.back());
    require(residual < decay_tol, errc::window_error,
            "connected g1 residual " + std::to_string(residual) +
                " at max tau; extend the delay window");

    // Tail fit: conn ~ A exp(z (tau - tau_max)) over the last samples, used
    // to extend the Fourier integral past the window analytically.
    complexd z(0.0, 0.0);
    complexd amp = conn.back();
    bool have_tail = false;
    if (std::abs(conn.back()) > 1e-12) {
        const std::size_t nfit = std::max<std::size_t>(4, n / 32);
        complexd acc(0.0, 0.0);
        int cnt = 0;
        for (std::size_t i = n - nfit; i + 1 < n; ++i) {
            if (std::abs(conn[i]) < 1e-15) continue;
            const double dt = g1_trace.taus[i + 1] - g1_trace.taus[i];
            acc += std::log(conn[i + 1] / conn[i]) / dt;
            ++cnt;
        }
        if (cnt > 0) {
            z = acc / static_cast<double>(cnt);
            have_tail = z.real() < 0.0;
        }
    }

    SpectrumTrace out;
    out.omegas = omegas;
    out.coherent_weight = std::abs(coh);
    out.density.resize(omegas.size());
    const double tau_max = g1_trace.taus.back();
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = rad_per_ns(omegas[k]);
        // trapezoid over [0, tau_max] of conn(tau) e^{i w tau}
        complexd integ(0.0, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dt = g1_trace.taus[i + 1] - g1_trace.taus[i];
            const complexd f0 = conn[i] * std::exp(complexd(0.0, w * g1_trace.taus[i]));
            const complexd f1 =
                conn[i + 1] * std::exp(complexd(0.0, w * g1_trace.taus[i + 1]));
            integ += 0.5 * dt * (f0 + f1);
        }
        if (have_tail)
            integ -= amp * std::exp(complexd(0.0, w * tau_max)) /
                     (z + complexd(0.0, w));
        // Hermitian extension to tau < 0 doubles the real part; density per
        // 2*pi*GHz absorbs the rad/ns measure.
        double dens = integ.real() / std::numbers::pi * two_pi;
        require(dens >= -1e-6, errc::solver_failure,
                "spectral density negative beyond tolerance");
        out.density[k] = dens;
    }
    return out;
}

/// Gaussian timing-response convolution of a g2 trace (sigma in ns) with an
/// even reflection at tau = 0. sigma = 0 returns the input unchanged.
inline CorrelationTrace convolve_irf(const CorrelationTrace& trace, double sigma) {
    require(sigma >= 0.0, errc::domain_error, "IRF width must be non-negative");
    if (sigma == 0.0) return trace;
    CorrelationTrace out = trace;
    const double half_width = 6.0 * sigma;
    for (std::size_t i = 0; i < trace.taus.size(); ++i) {
        const double t0 = trace.taus[i];
        const int nk = 121;
        double acc = 0.0, wsum = 0.0;
        for (int k = 0; k < nk; ++k) {
            const double u = -half_width + 2.0 * half_width * k / (nk - 1);
            const double w = std::exp(-u * u / (2.0 * sigma * sigma));
            // trace.at mirrors across tau = 0 (even extension)
            acc += w * trace.at(t0 + u).real();
            wsum += w;
        }
        out.values[i] = complexd(acc / wsum, 0.0);
    }
    return out;
}

} // namespace cqed
