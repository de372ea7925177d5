#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqed/analytic.hpp"
#include "cqed/detection.hpp"

using namespace cqed;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

/// Regression recipe on the two-level model itself: evolve sigma_- rho_ss
/// under the Bloch generator and read off the coherence; an oracle for the
/// closed-form expressions that shares nothing with them but the generator.
std::vector<complexd> bloch_g1_regression(const BlochParams& p,
                                          const std::vector<double>& taus) {
    const BlochState ss = bloch_steady(p);
    // m = sigma_- rho_ss has components (gg, ee, ge, eg) = (rho_eg, 0, rho_ee, 0)
    Eigen::Vector4cd m;
    m << ss.rho_eg, complexd(0, 0), complexd(ss.rho_ee, 0.0), complexd(0, 0);
    const double gp = rad_per_ns(p.gamma_par_enh);
    const double gs = rad_per_ns(p.gamma_star);
    const double om = rad_per_ns(p.omega_rabi);
    const complexd i1(0.0, 1.0);
    const auto rhs = [&](const Eigen::Vector4cd& y) {
        Eigen::Vector4cd d;
        const complexd diff = y(2) - y(3);
        d(0) = i1 * (om / 2.0) * diff + gp * y(1);
        d(1) = -i1 * (om / 2.0) * diff - gp * y(1);
        d(2) = -(gp / 2.0 + gs) * y(2) - i1 * (om / 2.0) * (y(1) - y(0));
        d(3) = -(gp / 2.0 + gs) * y(3) + i1 * (om / 2.0) * (y(1) - y(0));
        return d;
    };
    std::vector<complexd> out;
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    double t = 0.0;
    Eigen::Vector4cd y = m;
    for (double target : taus) {
        if (target > t) {
            integrate_dp54(rhs, y, t, target, opt);
            t = target;
        }
        out.push_back(y(2) / ss.rho_ee); // Tr(sigma_+ m) = m_ge
    }
    return out;
}

} // namespace

TEST_CASE("semiclassical reflection and transmission") {
    SECTION("lossless symmetric limit reduces to the cooperativity form") {
        const SystemParams p = preset_fig1();
        const double c = p.cooperativity();
        const complexd r = reflection_coefficient(p, -1.0);
        const complexd t = transmission_coefficient(p, -1.0);
        CHECK(r.real() == Catch::Approx(c / (1.0 + c)).epsilon(1e-14));
        CHECK(std::abs(r.imag()) < 1e-15);
        CHECK(t.real() == Catch::Approx(-1.0 / (1.0 + c)).epsilon(1e-14));
    }

    SECTION("cold symmetric cavity transmits fully on resonance") {
        SystemParams p = preset_fig1();
        p.g = 0.0;
        const complexd r = reflection_coefficient(p, -1.0);
        const complexd t = transmission_coefficient(p, -1.0);
        CHECK(std::abs(r) < 1e-14);
        CHECK(t.real() == Catch::Approx(-1.0).epsilon(1e-14));
    }

    SECTION("hot cavity peaks at resonance, cold cavity dips") {
        const SystemParams hot = preset_fig1_sideleak();
        SystemParams cold = hot;
        cold.g = 0.0;
        const double r_hot_0 = std::norm(reflection_coefficient(hot, -1.0));
        const double r_cold_0 = std::norm(reflection_coefficient(cold, -1.0));
        const double r_hot_5 =
            std::norm(reflection_coefficient(hot.with_detuning(5.0), -1.0));
        const double r_cold_5 =
            std::norm(reflection_coefficient(cold.with_detuning(5.0), -1.0));
        CHECK(r_hot_0 > r_hot_5);   // reflectivity peak at the joint resonance
        CHECK(r_cold_0 < r_cold_5); // cold cavity reflectivity minimum
        // the cold minimum sits at the side-leakage level
        CHECK(r_cold_0 == Catch::Approx(std::pow(0.08, 2)).epsilon(0.05));
    }

    SECTION("two hot-cavity reflectivity minima flank the resonance") {
        const SystemParams hot = preset_fig1_sideleak();
        double best = 1e9, best_delta = 0.0;
        for (double delta = 0.05; delta < 10.0; delta += 0.05) {
            const double r2 =
                std::norm(reflection_coefficient(hot.with_detuning(delta), -1.0));
            if (r2 < best) { best = r2; best_delta = delta; }
        }
        CHECK(best < 0.02); // near-zero dip away from the centre
        CHECK(best_delta > 0.1);
    }
}

TEST_CASE("reflectivity from the density matrix") {
    SECTION("matches the closed form at low drive") {
        SystemParams p = preset_fig1();
        p = p.with_rabi(1e-3 * p.gamma_par_enhanced());
        const CompositeSpace space(2);
        const Liouvillian L(p, space);
        const DensityMatrix rho = steady_state(L);
        const auto me = reflectivity_from_rho(p, rho, L.ops());
        CHECK(std::abs(me.r - reflection_coefficient(p, -1.0)) < 1e-3);
        CHECK(std::abs(me.t - transmission_coefficient(p, -1.0)) < 1e-3);
    }

    SECTION("decoupled emitter gives the cold-cavity value at any drive") {
        SystemParams p = preset_fig1();
        p.g = 0.0;
        p.a_in = 2.0;
        const CompositeSpace space(8);
        const Liouvillian L(p, space);
        const auto me = reflectivity_from_rho(p, steady_state(L), L.ops());
        CHECK(std::abs(me.r - reflection_coefficient(p, -1.0)) < 1e-8);
    }

    SECTION("saturation washes out the emitter peak") {
        SystemParams p = preset_fig1();
        const SystemParams weak = p.with_rabi(0.05 * p.gamma_par_enhanced());
        const SystemParams strong = p.with_rabi(3.0 * p.gamma_par_enhanced());
        const CompositeSpace small(4), big(24);
        const Liouvillian Lw(weak, small), Ls(strong, big);
        const auto rw = reflectivity_from_rho(weak, steady_state(Lw), Lw.ops());
        const auto rs = reflectivity_from_rho(strong, steady_state(Ls), Ls.ops());
        CHECK(std::abs(rs.r) < std::abs(rw.r)); // approaches the cold value 0
        CHECK(std::abs(rs.r) < 0.3);
    }

    SECTION("zero drive is rejected") {
        const SystemParams p = preset_fig1();
        const CompositeSpace space(2);
        const Liouvillian L(p, space);
        const DensityMatrix rho = steady_state(L);
        CHECK_THROWS_AS(reflectivity_from_rho(p, rho, L.ops()), error);
    }
}

TEST_CASE("Bloch steady state") {
    SECTION("no drive leaves the ground state") {
        const BlochState s = bloch_steady({0.0, 2.8, 0.0, 0.0});
        CHECK(s.rho_ee == 0.0);
        CHECK(std::abs(s.rho_ge) == 0.0);
    }

    SECTION("strong drive saturates at one half") {
        const BlochState s = bloch_steady({2.8e4, 2.8, 0.0, 0.0});
        CHECK(s.rho_ee == Catch::Approx(0.5).margin(1e-7));
    }

    SECTION("resonant saturation parameter without dephasing") {
        const BlochParams p{0.7, 2.8, 0.0, 0.0};
        CHECK(p.saturation() ==
              Catch::Approx(2.0 * std::pow(0.7 / 2.8, 2)).epsilon(1e-14));
        const BlochState s = bloch_steady(p);
        const double sat = p.saturation();
        CHECK(s.rho_ee == Catch::Approx(0.5 * sat / (1.0 + sat)).epsilon(1e-14));
    }
}

TEST_CASE("scattering rates") {
    SECTION("low-drive asymptotics") {
        const BlochParams p{2.8e-3, 2.8, 0.0, 0.0};
        const auto r = scattering_rates(p);
        const double sat = p.saturation();
        CHECK(r.i_coh ==
              Catch::Approx(rad_per_ns(2.8) * sat).epsilon(1e-5));
        CHECK(r.i_incoh ==
              Catch::Approx(rad_per_ns(2.8) * sat * sat).epsilon(1e-5));
    }

    SECTION("identities at resonance without dephasing") {
        for (double om : {0.1, 0.5, 1.4, 2.8, 8.0}) {
            const BlochParams p{om, 2.8, 0.0, 0.0};
            const auto r = scattering_rates(p);
            const double sat = p.saturation();
            CHECK(r.i_incoh ==
                  Catch::Approx(sat * r.i_coh).epsilon(1e-12));
            CHECK(r.i_coh + r.i_incoh ==
                  Catch::Approx(rad_per_ns(2.8) * sat / (1.0 + sat))
                      .epsilon(1e-12));
        }
    }

    SECTION("dephasing-dominated coherent fraction in the weak limit") {
        const double gs = 0.4;
        const BlochParams p{1e-4, 2.8, gs, 0.0};
        const auto r = scattering_rates(p);
        CHECK(r.i_coh / (r.i_coh + r.i_incoh) ==
              Catch::Approx(2.8 / (2.8 + 2.0 * gs)).epsilon(1e-5));
    }
}

TEST_CASE("closed-form first-order coherence") {
    SECTION("zero drive without dephasing is perfectly coherent") {
        const BlochParams p{0.0, 2.8, 0.0, 0.0};
        const auto t = g1_closed_form(p, linspace(0.0, 2.0, 41));
        for (const auto& v : t.values)
            CHECK(v.real() == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("normalised at zero delay and approaching the coherent weight") {
        const BlochParams p{0.12, 2.8, 0.08, 0.0};
        const auto t = g1_closed_form(p, linspace(0.0, 8.0, 161));
        CHECK(t.values.front().real() == Catch::Approx(1.0).margin(1e-9));
        const double gp = rad_per_ns(p.gamma_par_enh);
        const double coh = (gp / 2.0) /
                           (gp / 2.0 + rad_per_ns(p.gamma_star) +
                            std::pow(rad_per_ns(p.omega_rabi), 2) / gp);
        CHECK(t.values.back().real() == Catch::Approx(coh).margin(1e-8));
    }

    SECTION("matches the regression recipe on the shared domain") {
        for (const BlochParams p :
             {BlochParams{0.15, 2.8, 0.05, 0.0}, BlochParams{0.5, 2.8, 0.0, 0.0},
              BlochParams{0.05, 1.0, 0.12, 0.0}}) {
            const auto taus = linspace(0.0, 4.0, 81);
            const auto closed = g1_closed_form(p, taus);
            const auto reg = bloch_g1_regression(p, taus);
            for (std::size_t i = 0; i < taus.size(); ++i)
                CHECK(std::abs(closed.values[i] - reg[i]) < 1e-6);
        }
    }

    SECTION("degenerate-damping limit stays finite and continuous") {
        const double gp = 2.8, gs = 0.0;
        const double bound = (gp - 2.0 * gs) / 4.0;
        const BlochParams just_below{bound * (1.0 - 1e-10), gp, gs, 0.0};
        const BlochParams nearby{bound * (1.0 - 1e-4), gp, gs, 0.0};
        const auto taus = linspace(0.0, 3.0, 31);
        const auto a = g1_closed_form(just_below, taus);
        const auto b = g1_closed_form(nearby, taus);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            CHECK(std::isfinite(a.values[i].real()));
            CHECK(std::abs(a.values[i] - b.values[i]) < 1e-3);
        }
    }

    SECTION("high-drive branch is out of range") {
        CHECK_THROWS_AS(g1_closed_form({2.0, 2.8, 0.0, 0.0}, {0.0, 1.0}), error);
        CHECK_THROWS_AS(g1_closed_form({0.1, 2.8, 0.0, 0.5}, {0.0, 1.0}), error);
    }
}

TEST_CASE("closed-form spectrum") {
    SECTION("weak drive concentrates weight in the delta component") {
        const BlochParams p{1e-3, 2.8, 0.0, 0.0};
        const auto s = spectrum_closed_form(p, linspace(-10.0, 10.0, 201));
        CHECK(s.coherent_weight == Catch::Approx(1.0).margin(1e-6));
    }

    SECTION("density integrates to the incoherent weight") {
        const BlochParams p{0.3, 2.8, 0.1, 0.0};
        const auto omegas = linspace(-120.0, 120.0, 24001);
        const auto s = spectrum_closed_form(p, omegas);
        double integral = 0.0;
        for (std::size_t i = 0; i + 1 < omegas.size(); ++i)
            integral += 0.5 * (s.density[i] + s.density[i + 1]) *
                        (omegas[i + 1] - omegas[i]);
        CHECK(integral ==
              Catch::Approx(1.0 - s.coherent_weight).epsilon(0.02));
    }

    SECTION("degenerate-damping branch matches the regular branch nearby") {
        const double gp = 2.8;
        const double bound = gp / 4.0;
        const auto omegas = linspace(-8.0, 8.0, 81);
        const auto a =
            spectrum_closed_form({bound * (1.0 - 1e-10), gp, 0.0, 0.0}, omegas);
        const auto b =
            spectrum_closed_form({bound * (1.0 - 1e-4), gp, 0.0, 0.0}, omegas);
        for (std::size_t i = 0; i < omegas.size(); ++i)
            CHECK(a.density[i] == Catch::Approx(b.density[i]).margin(1e-4));
    }
}

TEST_CASE("closed-form second-order coherence") {
    SECTION("perfect antibunching at zero delay, recovery to one") {
        const BlochParams p{0.2, 2.8, 0.05, 0.0};
        const auto t = g2_closed_form(p, linspace(0.0, 6.0, 121));
        CHECK(t.values.front().real() == Catch::Approx(0.0).margin(1e-12));
        CHECK(t.values.back().real() == Catch::Approx(1.0).margin(1e-6));
        // monotone rise at low drive
        for (std::size_t i = 1; i < t.values.size(); ++i)
            CHECK(t.values[i].real() >= t.values[i - 1].real() - 1e-12);
    }

    SECTION("matches the regression recipe from the equations of motion") {
        // oracle: g2(tau) = rho_ee(tau | start from ground) / rho_ee(ss)
        for (const BlochParams p :
             {BlochParams{0.2, 2.8, 0.05, 0.0}, BlochParams{0.6, 2.8, 0.0, 0.0}}) {
            const auto taus = linspace(0.0, 4.0, 81);
            const auto closed = g2_closed_form(p, taus);
            BlochState ground;
            const auto states = bloch_integrate(p, ground, taus);
            const double ss = bloch_steady(p).rho_ee;
            for (std::size_t i = 0; i < taus.size(); ++i)
                CHECK(std::abs(closed.values[i].real() -
                               states[i].rho_ee / ss) < 1e-6);
        }
    }

    SECTION("out-of-domain drive is rejected") {
        CHECK_THROWS_AS(g2_closed_form({1.0, 2.8, 0.0, 0.0}, {0.0, 1.0}), error);
    }
}

TEST_CASE("Bloch integration") {
    SECTION("free decay from the excited state") {
        const BlochParams p{0.0, 2.8, 0.0, 0.0};
        BlochState excited;
        excited.rho_gg = 0.0;
        excited.rho_ee = 1.0;
        const auto taus = linspace(0.0, 1.0, 21);
        const auto states = bloch_integrate(p, excited, taus);
        for (std::size_t i = 0; i < taus.size(); ++i)
            CHECK(states[i].rho_ee ==
                  Catch::Approx(std::exp(-rad_per_ns(2.8) * taus[i]))
                      .margin(1e-9));
    }

    SECTION("steady state is a fixed point") {
        const BlochParams p{0.4, 2.8, 0.02, 0.0};
        const BlochState ss = bloch_steady(p);
        const auto states = bloch_integrate(p, ss, {0.0, 1.0, 3.0});
        for (const auto& st : states) {
            CHECK(st.rho_ee == Catch::Approx(ss.rho_ee).margin(1e-9));
            CHECK(std::abs(st.rho_ge - ss.rho_ge) < 1e-9);
        }
    }

    SECTION("population is conserved") {
        const BlochParams p{5.0, 2.8, 0.1, 0.0};
        BlochState ground;
        const auto states = bloch_integrate(p, ground, linspace(0.0, 2.0, 201));
        for (const auto& st : states)
            CHECK(st.rho_gg + st.rho_ee == Catch::Approx(1.0).margin(1e-10));
    }

    SECTION("strong drive produces damped oscillations at the Rabi rate") {
        const double om = 5.0 * 2.8;
        const BlochParams p{om, 2.8, 0.0, 0.0};
        BlochState ground;
        const auto taus = linspace(0.0, 0.5, 2001);
        const auto states = bloch_integrate(p, ground, taus);
        // first maximum of rho_ee sits half a Rabi period in
        std::size_t imax = 0;
        for (std::size_t i = 1; i + 1 < states.size(); ++i)
            if (states[i].rho_ee > states[imax].rho_ee) imax = i;
            else if (imax > 0 && i > imax + 50) break;
        const double t_first = taus[imax];
        const double period = two_pi / rad_per_ns(om);
        CHECK(t_first == Catch::Approx(period / 2.0).epsilon(0.1));
    }
}
