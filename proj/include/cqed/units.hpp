#pragma once

#include <numbers>

namespace cqed {

// Unit conventions used throughout:
//   * rates and detunings are stored as frequencies in 2*pi*GHz, i.e. the
//     stored value nu corresponds to the angular rate 2*pi*nu rad/ns;
//   * times and delays are in ns;
//   * drive and local-oscillator amplitudes are in sqrt(photons/ns);
//   * photon fluxes are in photons/ns.
// Conversion to angular rates happens exactly once, at the point where a
// generator or closed-form expression is evaluated against a time in ns.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Stored rate (2*pi*GHz) -> angular rate (rad/ns).
inline constexpr double rad_per_ns(double rate_2pi_ghz) {
    return two_pi * rate_2pi_ghz;
}

} // namespace cqed
