#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cqed/correlations.hpp"
#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/parallel.hpp"

namespace cqed {

struct TrajectoryConfig {
    int n_traj = 1000;
    double t_end = 10.0;    ///< ns
    double dt_max = 0.05;   ///< ns, step cap
    std::uint64_t seed = 1;
    double burn_in = 0.2;   ///< fraction of the horizon discarded

    void validate() const {
        require(n_traj >= 1, errc::domain_error, "need at least one trajectory");
        require(burn_in >= 0.0 && burn_in < 1.0, errc::domain_error,
                "burn-in fraction must lie in [0, 1)");
        require(t_end > 0.0 && dt_max > 0.0, errc::domain_error,
                "horizon and step cap must be positive");
    }
};

/// A complex moment with independent standard errors on its real and
/// imaginary parts (between-trajectory scatter).
struct MomentStat {
    complexd mean{0.0, 0.0};
    double se_re = 0.0;
    double se_im = 0.0;
};

struct MomentEstimate {
    MomentStat a;        ///< <a>
    MomentStat n;        ///< <a^dag a>
    MomentStat a2;       ///< <a^2>
    MomentStat ada2;     ///< <a^dag a^2>
    MomentStat n2;       ///< <a^dag^2 a^2>
    MomentStat pe;       ///< <sigma_+ sigma_->
    MomentStat sz;       ///< <sigma_z>
    std::array<double, 3> jump_rate{};  ///< per ns: cavity, emitter, dephasing
    double averaged_time = 0.0;         ///< summed post-burn-in time (ns)
    int n_traj = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Shared pieces of a trajectory run over one composite space.
struct McwfContext {
    SpaceOps ops;
    Matrix heff;
    double kappa, gpar, gstar2; ///< jump rates, rad/ns

    McwfContext(const SystemParams& p, const CompositeSpace& space)
        : ops(make_space_ops(space)) {
        kappa = rad_per_ns(p.kappa());
        gpar = rad_per_ns(p.gamma_par);
        gstar2 = rad_per_ns(p.gamma_star) / 2.0;
        heff = hamiltonian(p, space).entries;
        heff -= complexd(0.0, 0.5) *
                (kappa * ops.num + gpar * ops.proj_e +
                 gstar2 * Matrix::Identity(space.dim(), space.dim()));
    }
};

/// Evolves one trajectory from |g,0>, invoking
/// `on_segment(psi_start, psi_end, t0, t1)` after every smooth stretch (no
/// jump inside) and `on_jump(channel, t)` at each quantum jump. States are
/// unnormalised.
template <typename SegmentFn, typename JumpFn>
void run_single_trajectory(const McwfContext& ctx, const TrajectoryConfig& cfg,
                           std::uint64_t traj_index, SegmentFn&& on_segment,
                           JumpFn&& on_jump) {
    using Vec = Eigen::VectorXcd;
    std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x51ed2701ull + traj_index)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const auto rhs = [&ctx](const Vec& psi) -> Vec {
        return complexd(0.0, -1.0) * (ctx.heff * psi);
    };

    Vec psi = Vec::Zero(ctx.ops.space.dim());
    psi(0) = 1.0; // |g, 0>
    double t = 0.0;
    double r_jump = unif(rng);

    OdeOptions opt;
    opt.rtol = 1e-7;
    opt.atol = 1e-10;
    opt.h_max = cfg.dt_max;
    Dp54Stepper<Vec> stepper;
    Vec k1 = rhs(psi);
    double hstep = std::min(cfg.dt_max, 1e-3);

    const auto apply_jump = [&](Vec& state) {
        const double w_cav = ctx.kappa * (ctx.ops.a * state).squaredNorm();
        const double w_em = ctx.gpar * (ctx.ops.sm * state).squaredNorm();
        const double w_de = ctx.gstar2 * state.squaredNorm();
        const double tot = w_cav + w_em + w_de;
        const double pick = unif(rng) * tot;
        int channel = 2;
        if (pick < w_cav) channel = 0;
        else if (pick < w_cav + w_em) channel = 1;
        if (channel == 0) state = ctx.ops.a * state;
        else if (channel == 1) state = ctx.ops.sm * state;
        else state = ctx.ops.sz * state;
        const double nrm = state.norm();
        require(nrm > 1e-30, errc::solver_failure, "jump annihilated the state");
        state /= nrm;
        r_jump = unif(rng);
        return channel;
    };

    int reject_streak = 0;
    while (t < cfg.t_end) {
        const double h = std::min(hstep, cfg.t_end - t);
        double errnorm = 0.0;
        Vec k_last = k1;
        Vec psi_new = stepper.attempt(rhs, psi, k1, h, opt, errnorm, k_last);
        if (errnorm > 1.0) {
            hstep = h * std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 1.0);
            require(++reject_streak < 256 && hstep >= 1e-12,
                    errc::propagation_failure,
                    "trajectory step underflow at t = " + std::to_string(t));
            continue;
        }
        reject_streak = 0;

        if (psi_new.squaredNorm() <= r_jump) {
            // bisect the jump time inside [t, t+h] to 1e-6 ns
            double lo = 0.0, hi = h;
            Vec psi_hi = psi_new;
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                Vec psi_mid = psi;
                integrate_dp54(rhs, psi_mid, 0.0, mid, opt);
                if (psi_mid.squaredNorm() <= r_jump) {
                    hi = mid;
                    psi_hi = psi_mid;
                } else {
                    lo = mid;
                }
            }
            on_segment(psi, psi_hi, t, t + hi);
            t += hi;
            psi = psi_hi;
            const int channel = apply_jump(psi);
            on_jump(channel, t);
            k1 = rhs(psi);
            hstep = std::min(hstep, cfg.dt_max);
            continue;
        }

        on_segment(psi, psi_new, t, t + h);
        t += h;
        psi.swap(psi_new);
        k1.swap(k_last);
        hstep = h * std::clamp(errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0,
                               0.2, 5.0);
    }
}

struct TrajAccum {
    std::array<complexd, 7> integ{};
    double time = 0.0;
    std::array<int, 3> jumps{};
};

} // namespace detail

/// Quantum-trajectory (Monte-Carlo wave-function) estimate of steady-state
/// moments. Jump channels: sqrt(kappa) a, sqrt(gamma_par) sigma_-,
/// sqrt(gamma_star/2) sigma_z. Ergodic time-average after burn-in; standard
/// errors from the between-trajectory variance; bit-reproducible for a fixed
/// seed independent of thread scheduling.
inline MomentEstimate run_trajectories(const SystemParams& p,
                                       const CompositeSpace& space,
                                       const TrajectoryConfig& cfg) {
    p.validate();
    cfg.validate();
    const detail::McwfContext ctx(p, space);
    const double t_burn = cfg.burn_in * cfg.t_end;

    using Vec = Eigen::VectorXcd;
    const auto moments_of = [&ctx](const Vec& psi) {
        const double n2 = psi.squaredNorm();
        const Vec phi1 = ctx.ops.a * psi;
        const Vec phi2 = ctx.ops.a * phi1;
        const Vec phis = ctx.ops.sm * psi;
        std::array<complexd, 7> m;
        m[0] = psi.dot(phi1) / n2;
        m[1] = complexd(phi1.squaredNorm() / n2, 0.0);
        m[2] = psi.dot(phi2) / n2;
        m[3] = phi1.dot(phi2) / n2;
        m[4] = complexd(phi2.squaredNorm() / n2, 0.0);
        m[5] = complexd(phis.squaredNorm() / n2, 0.0);
        m[6] = psi.dot(ctx.ops.sz * psi) / n2;
        return m;
    };

    std::vector<detail::TrajAccum> results(cfg.n_traj);
    parallel_for(static_cast<std::size_t>(cfg.n_traj), [&](std::size_t traj) {
        detail::TrajAccum acc;
        std::array<complexd, 7> f_prev{};
        bool have_prev = false;
        detail::run_single_trajectory(
            ctx, cfg, traj,
            [&](const Vec& /*psi0*/, const Vec& psi, double t0, double t1) {
                if (t1 <= t_burn) return;
                const auto f_new = moments_of(psi);
                if (t0 >= t_burn && have_prev) {
                    const double dt = t1 - t0;
                    for (std::size_t k = 0; k < 7; ++k)
                        acc.integ[k] += 0.5 * dt * (f_prev[k] + f_new[k]);
                    acc.time += dt;
                } else {
                    // segment entering the averaging window
                    const double dt = t1 - std::max(t0, t_burn);
                    for (std::size_t k = 0; k < 7; ++k)
                        acc.integ[k] += dt * f_new[k];
                    acc.time += dt;
                }
                f_prev = f_new;
                have_prev = true;
            },
            [&](int channel, double t) {
                have_prev = false; // expectation values jump discontinuously
                if (t >= t_burn) ++acc.jumps[static_cast<std::size_t>(channel)];
            });
        results[traj] = acc;
    });

    // deterministic sequential reduction
    MomentEstimate est;
    est.n_traj = cfg.n_traj;
    std::array<std::vector<complexd>, 7> per_traj;
    for (auto& v : per_traj) v.reserve(cfg.n_traj);
    double total_time = 0.0;
    std::array<double, 3> total_jumps{};
    for (const auto& acc : results) {
        require(acc.time > 0.0, errc::domain_error,
                "no post-burn-in averaging window; extend t_end");
        for (std::size_t k = 0; k < 7; ++k)
            per_traj[k].push_back(acc.integ[k] / acc.time);
        total_time += acc.time;
        for (std::size_t c = 0; c < 3; ++c) total_jumps[c] += acc.jumps[c];
    }

    const auto reduce = [&](std::size_t k) {
        MomentStat s;
        complexd sum(0.0, 0.0);
        for (const auto& v : per_traj[k]) sum += v;
        s.mean = sum / static_cast<double>(cfg.n_traj);
        if (cfg.n_traj > 1) {
            double var_re = 0.0, var_im = 0.0;
            for (const auto& v : per_traj[k]) {
                var_re += (v.real() - s.mean.real()) * (v.real() - s.mean.real());
                var_im += (v.imag() - s.mean.imag()) * (v.imag() - s.mean.imag());
            }
            s.se_re = std::sqrt(var_re / (cfg.n_traj - 1) / cfg.n_traj);
            s.se_im = std::sqrt(var_im / (cfg.n_traj - 1) / cfg.n_traj);
        }
        return s;
    };
    est.a = reduce(0);
    est.n = reduce(1);
    est.a2 = reduce(2);
    est.ada2 = reduce(3);
    est.n2 = reduce(4);
    est.pe = reduce(5);
    est.sz = reduce(6);
    est.averaged_time = total_time;
    for (std::size_t c = 0; c < 3; ++c) est.jump_rate[c] = total_jumps[c] / total_time;
    return est;
}

/// Ensemble density matrices on a coarse time grid, with elementwise
/// standard errors (between-trajectory scatter of |psi><psi| / <psi|psi>).
struct EnsembleDensity {
    std::vector<double> times;
    std::vector<Matrix> mean;
    std::vector<Matrix> se; ///< per-element standard error, stored as |se_re| + i |se_im|
};

inline EnsembleDensity ensemble_density(const SystemParams& p,
                                        const CompositeSpace& space,
                                        const TrajectoryConfig& cfg,
                                        const std::vector<double>& times) {
    p.validate();
    cfg.validate();
    require(!times.empty(), errc::domain_error, "empty sample grid");
    const detail::McwfContext ctx(p, space);
    const int d = space.dim();
    using Vec = Eigen::VectorXcd;

    for (double tsamp : times)
        require(tsamp >= 0.0 && tsamp <= cfg.t_end, errc::domain_error,
                "sample grid extends beyond the trajectory horizon");

    std::vector<std::vector<Matrix>> snaps(
        cfg.n_traj, std::vector<Matrix>(times.size()));
    parallel_for(static_cast<std::size_t>(cfg.n_traj), [&](std::size_t traj) {
        std::size_t next = 0;
        OdeOptions opt;
        opt.rtol = 1e-7;
        opt.atol = 1e-10;
        const auto rhs = [&ctx](const Vec& psi) -> Vec {
            return complexd(0.0, -1.0) * (ctx.heff * psi);
        };
        const auto snapshot = [&](const Vec& psi) {
            snaps[traj][next] = psi * psi.adjoint() / psi.squaredNorm();
            ++next;
        };
        detail::run_single_trajectory(
            ctx, cfg, traj,
            [&](const Vec& psi0, const Vec& psi1, double t0, double t1) {
                while (next < times.size() && times[next] <= t1 + 1e-12) {
                    if (times[next] <= t0 + 1e-12) {
                        snapshot(psi0);
                    } else if (times[next] >= t1 - 1e-12) {
                        snapshot(psi1);
                    } else {
                        Vec mid = psi0;
                        integrate_dp54(rhs, mid, 0.0, times[next] - t0, opt);
                        snapshot(mid);
                    }
                }
            },
            [](int, double) {});
        require(next == times.size(), errc::solver_failure,
                "trajectory ended before the sample grid was exhausted");
    });

    EnsembleDensity out;
    out.times = times;
    out.mean.assign(times.size(), Matrix::Zero(d, d));
    out.se.assign(times.size(), Matrix::Zero(d, d));
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (int i = 0; i < cfg.n_traj; ++i) out.mean[k] += snaps[i][k];
        out.mean[k] /= static_cast<double>(cfg.n_traj);
        if (cfg.n_traj > 1) {
            Eigen::MatrixXd var_re = Eigen::MatrixXd::Zero(d, d);
            Eigen::MatrixXd var_im = Eigen::MatrixXd::Zero(d, d);
            for (int i = 0; i < cfg.n_traj; ++i) {
                const Matrix diff = snaps[i][k] - out.mean[k];
                var_re += diff.real().cwiseAbs2();
                var_im += diff.imag().cwiseAbs2();
            }
            var_re /= (cfg.n_traj - 1.0) * cfg.n_traj;
            var_im /= (cfg.n_traj - 1.0) * cfg.n_traj;
            out.se[k] = var_re.cwiseSqrt().cast<complexd>() +
                        complexd(0.0, 1.0) *
                            var_im.cwiseSqrt().cast<complexd>();
        }
    }
    return out;
}

struct ValueWithError {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// g2(0) of O = c + s a from estimated stationary moments, by expanding
/// <O^dag O^dag O O> / <O^dag O>^2 in the seven moments with first-order
/// error propagation (moment errors treated as independent).
inline ValueWithError g2_zero_from_moments(const MomentEstimate& m,
                                           const DetectionField& field) {
    field.validate();
    const complexd c = field.offset;
    const complexd s = field.cavity_weight;
    if (std::abs(s) == 0.0) return {1.0, 0.0}; // pure coherent offset

    const complexd u = std::conj(c) * s;
    const complexd u2 = u * u;
    const double c2 = std::norm(c);
    const double s2 = std::norm(s);

    const double x = m.a.mean.real(), y = m.a.mean.imag();
    const double n = m.n.mean.real();
    const double p_re = m.a2.mean.real(), p_im = m.a2.mean.imag();
    const double r_re = m.ada2.mean.real(), r_im = m.ada2.mean.imag();
    const double n2 = m.n2.mean.real();

    const double f = c2 + 2.0 * (u.real() * x - u.imag() * y) + s2 * n;
    const double f_se = std::sqrt(
        std::pow(2.0 * u.real() * m.a.se_re, 2) +
        std::pow(2.0 * u.imag() * m.a.se_im, 2) + std::pow(s2 * m.n.se_re, 2));
    require(f > 3.0 * f_se, errc::undefined_normalization,
            "flux estimate consistent with zero; more trajectories needed");

    const double num = c2 * c2 + 4.0 * c2 * (u.real() * x - u.imag() * y) +
                       2.0 * (u2.real() * p_re - u2.imag() * p_im) +
                       4.0 * c2 * s2 * n +
                       4.0 * s2 * (u.real() * r_re - u.imag() * r_im) +
                       s2 * s2 * n2;
    const double g2 = num / (f * f);

    // d(g2) = dN / f^2 - 2 g2 dF / f, per independent moment component
    const auto contrib = [&](double dn_dm, double df_dm, double se) {
        const double d = dn_dm / (f * f) - 2.0 * g2 * df_dm / f;
        return d * d * se * se;
    };
    double var = 0.0;
    var += contrib(4.0 * c2 * u.real(), 2.0 * u.real(), m.a.se_re);
    var += contrib(-4.0 * c2 * u.imag(), -2.0 * u.imag(), m.a.se_im);
    var += contrib(4.0 * c2 * s2, s2, m.n.se_re);
    var += contrib(2.0 * u2.real(), 0.0, m.a2.se_re);
    var += contrib(-2.0 * u2.imag(), 0.0, m.a2.se_im);
    var += contrib(4.0 * s2 * u.real(), 0.0, m.ada2.se_re);
    var += contrib(-4.0 * s2 * u.imag(), 0.0, m.ada2.se_im);
    var += contrib(s2 * s2, 0.0, m.n2.se_re);
    return {g2, std::sqrt(var)};
}

} // namespace cqed
