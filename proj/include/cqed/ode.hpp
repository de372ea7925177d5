#pragma once

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;   ///< 0 = pick automatically
    double h_min = 1e-12;  ///< step-size underflow threshold (ns)
    double h_max = 0.0;    ///< 0 = unlimited
};

/// One embedded Dormand-Prince 5(4) attempt over Eigen-compatible states.
/// The caller owns step-size control; `error_norm` is the max-norm error
/// scaled to atol/rtol (accept when <= 1).
template <typename State>
struct Dp54Stepper {
    template <typename Rhs>
    State attempt(const Rhs& rhs, const State& y, const State& k1, double h,
                  const OdeOptions& opt, double& error_norm, State& k_last) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                                b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                                e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;

        const State k2 = rhs((y + h * a21 * k1).eval());
        const State k3 = rhs((y + h * (a31 * k1 + a32 * k2)).eval());
        const State k4 = rhs((y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        const State k5 =
            rhs((y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        const State k6 = rhs(
            (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        State ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k_last = rhs(ynew);
        const State err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k_last);
        const double scale =
            opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(),
                                           ynew.cwiseAbs().maxCoeff());
        error_norm = err.cwiseAbs().maxCoeff() / scale;
        return ynew;
    }
};

/// Adaptive integration of dy/dt = rhs(y) from t0 to t1 in place. Throws
/// propagation-failure with the time reached on step-size underflow.
template <typename State, typename Rhs>
void integrate_dp54(const Rhs& rhs, State& y, double t0, double t1,
                    const OdeOptions& opt = {}) {
    if (t1 <= t0) return;
    Dp54Stepper<State> stepper;
    double t = t0;
    State k1 = rhs(y);
    double h = opt.h_init;
    if (h <= 0.0) {
        const double ynorm = y.cwiseAbs().maxCoeff() + opt.atol;
        const double fnorm = k1.cwiseAbs().maxCoeff() + opt.atol;
        h = std::min(0.1 * ynorm / fnorm, t1 - t0);
        if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * (t1 - t0);
    }
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < opt.h_min)
            fail(errc::propagation_failure,
                 "step size underflow at t = " + std::to_string(t) + " ns");
        double errnorm = 0.0;
        State k_last = k1;
        State ynew = stepper.attempt(rhs, y, k1, h, opt, errnorm, k_last);
        if (errnorm <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k_last); // first-same-as-last
        }
        const double factor =
            (errnorm > 0.0) ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    }
}

} // namespace cqed
