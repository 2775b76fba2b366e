#include <cmath>
#include <vector>

#include "doctest.h"

#include "csmpd/constants.hpp"
#include "csmpd/errors.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/metrics.hpp"
#include "test_util.hpp"

using namespace csmpd;
using csmpd::test::rel;

namespace {

CycleSpec make_cycle(double t_d, double t_ro, double t_reset, double n_reset) {
    CycleSpec c;
    c.t_d = t_d;
    c.t_ro = t_ro;
    c.t_reset = t_reset;
    c.n_reset = n_reset;
    return c;
}

QubitSpec idle_qubit(double t1, double p_eq, double p_eq_reset) {
    QubitSpec q;
    q.t1 = t1;
    q.p_eq = p_eq;
    q.p_eq_reset = p_eq_reset;
    return q;
}

} // namespace

TEST_CASE("thermal occupation is Bose-Einstein with safe limits") {
    CHECK(thermal_occupation(0.0, 7e9) == 0.0);
    // At hf = kT ln 2 the occupation is exactly one.
    const double t_ln2 = k_planck * 1e9 / (k_boltzmann * std::log(2.0));
    CHECK(thermal_occupation(t_ln2, 1e9) == rel(1.0, 1e-12));
    // Rayleigh-Jeans limit: n ~ kT/(hf) - 1/2 for hf << kT.
    const double x = k_planck * 1e6 / k_boltzmann;  // T = 1 K
    CHECK(thermal_occupation(1.0, 1e6) == rel(1.0 / x - 0.5, 1e-4));
    // Deep quantum limit underflows to zero instead of dividing inf.
    CHECK(thermal_occupation(1e-6, 1e10) == 0.0);
    // Operating-point anchors.
    CHECK(thermal_occupation(0.040, 7e9) == rel(2.2522e-4, 5e-4));
    CHECK(thermal_occupation(0.044, 8.798e9) == rel(6.798e-5, 5e-4));
    CHECK_THROWS_AS(thermal_occupation(-0.1, 7e9), Error);
    CHECK_THROWS_AS(thermal_occupation(0.1, 0.0), Error);
}

TEST_CASE("a measured background occupation overrides Bose-Einstein") {
    Environment env;
    env.temperature = 0.040;
    env.background_occupations[7e9] = 3e-4;
    CHECK(mean_occupation(env, 7e9) == 3e-4);
    CHECK(mean_occupation(env, 8.798e9) ==
          rel(thermal_occupation(0.040, 8.798e9), 1e-12));
}

TEST_CASE("intrinsic qubit dark rate, linearized and exact") {
    const QubitSpec q = idle_qubit(50e-6, 1e-3, 1e-5);
    SUBCASE("reset passes lengthen the cycle and dilute the rate") {
        CHECK(alpha_q(q, make_cycle(10e-6, 1e-6, 100e-9, 0.0)) ==
              rel(18.909091, 1e-6));
        CHECK(alpha_q(q, make_cycle(10e-6, 1e-6, 100e-9, 1.0)) ==
              rel(17.190083, 1e-6));
    }
    SUBCASE("the linearization overshoots by x/(1-e^-x)") {
        const QubitSpec clean = idle_qubit(50e-6, 1e-3, 0.0);
        const CycleSpec short_w = make_cycle(2.5e-6, 1e-6, 100e-9, 0.0);
        const CycleSpec long_w = make_cycle(12.5e-6, 1e-6, 100e-9, 0.0);
        CHECK(alpha_q(clean, short_w) / alpha_q_exact(clean, short_w) ==
              rel(1.025210, 1e-5));
        CHECK(alpha_q(clean, long_w) / alpha_q_exact(clean, long_w) ==
              rel(1.130203, 1e-5));
    }
    SUBCASE("a perfectly reset cold qubit never clicks") {
        CHECK(alpha_q(idle_qubit(0.0, 0.0, 0.0), make_cycle(1e-5, 1e-6, 0.0, 0.0)) ==
              0.0);
        CHECK_THROWS_AS(
            alpha_q(idle_qubit(0.0, 1e-3, 0.0), make_cycle(1e-5, 1e-6, 0.0, 0.0)),
            Error);
    }
}

TEST_CASE("thermal dark rate scales as eta kappa_d / 4 times occupation") {
    CHECK(alpha_th(0.8, hz_to_angular(250e3), 2.25e-4) == rel(70.686, 1e-4));
    CHECK(alpha_th(0.10, hz_to_angular(216e3), 1.0) == rel(33929.2, 1e-5));
    CHECK(alpha_th(0.0, 1e6, 1e-4) == 0.0);
    CHECK_THROWS_AS(alpha_th(-0.1, 1e6, 1e-4), Error);
}

TEST_CASE("the noise budget sums its terms and correlates cascaded flags") {
    const CycleSpec cycle = make_cycle(10e-6, 1e-6, 100e-9, 0.0);
    const QubitSpec q0 = idle_qubit(50e-6, 1e-3, 1e-5);
    const QubitSpec q1 = idle_qubit(30e-6, 2e-3, 2e-5);
    Environment env;
    env.temperature = 0.040;

    const NoiseBudget one = noise_budget({q0}, cycle, 0.25, hz_to_angular(250e3),
                                         env, 7e9, 1.5, 0.5);
    CHECK(one.alpha_q == rel(alpha_q(q0, cycle), 1e-12));
    CHECK(one.alpha_pump == 1.5);
    CHECK(one.alpha_ro == 0.5);
    CHECK(one.alpha_th ==
          rel(alpha_th(0.25, hz_to_angular(250e3), thermal_occupation(0.040, 7e9)),
              1e-12));
    CHECK(one.alpha_total ==
          rel(one.alpha_q + one.alpha_pump + one.alpha_ro + one.alpha_th, 1e-12));

    const NoiseBudget two = noise_budget({q0, q1}, cycle, 0.25,
                                         hz_to_angular(250e3), env, 7e9, 0.0, 0.0);
    const double tc = cycle.t_cycle();
    CHECK(two.alpha_q ==
          rel(alpha_q(q0, cycle) * tc * alpha_q(q1, cycle), 1e-12));
    CHECK(two.alpha_q < one.alpha_q / 1e3);  // coincidence suppression
    CHECK_THROWS_AS(
        noise_budget({q0}, cycle, 0.25, 1e6, env, 7e9, -1.0, 0.0), Error);
}

TEST_CASE("window efficiency and its optimal operating point") {
    CHECK(eta_q(13e-6, 30e-6) == rel(0.811511, 1e-5));
    CHECK(eta_q(13e-6, 15e-6) == rel(0.668826, 1e-5));
    CHECK(eta_q(1e-9, 50e-6) == rel(1.0, 1e-4));  // short-window limit
    CHECK_THROWS_AS(eta_q(0.0, 50e-6), Error);
    CHECK_THROWS_AS(eta_q(1e-6, 0.0), Error);

    CHECK(optimal_window_fraction(0.0) == 0.0);
    for (double r : {0.05, 0.2, 1.0}) {
        CAPTURE(r);
        const double x = optimal_window_fraction(r);
        // Stationarity of (1 - e^-x)/(x + r): e^x = x + 1 + r.
        CHECK(std::expm1(x) - x == rel(r, 1e-9));
        const auto objective = [&](double w) { return -std::expm1(-w) / (w + r); };
        CHECK(objective(x) >= objective(0.95 * x));
        CHECK(objective(x) >= objective(1.05 * x));
    }
    CHECK_THROWS_AS(optimal_window_fraction(-0.1), Error);
}

TEST_CASE("the efficiency budget multiplies out the detection chain") {
    const DeviceConfig dev = fixture_device("reference");
    const ScatteringResult sc = compute_scattering(dev.chain, -1e7, 1e7, 101);
    const EfficiencyBudget b = efficiency_budget(dev.chain, dev.cycle, sc);
    REQUIRE(b.eta_q.size() == 2);
    REQUIRE(b.f_ro.size() == 2);
    CHECK(b.eta_4wm == rel(sc.eta_4wm, 1e-12));
    CHECK(b.eta_m == rel(sc.eta_m, 1e-12));
    CHECK(b.eta_cycle == rel(0.780066, 1e-5));
    CHECK(b.eta_q[0] == rel(eta_q(dev.cycle.t_d, 30e-6), 1e-12));
    CHECK(b.f_ro[0] == 0.84);
    CHECK(b.f_ro[1] == 0.88);
    CHECK(b.eta_total == rel(b.eta_4wm * b.eta_m * b.eta_cycle * b.eta_q[0] *
                                 b.eta_q[1] * b.f_ro[0] * b.f_ro[1],
                             1e-12));
    CHECK(b.eta_total == rel(0.172829, 1e-4));

    SUBCASE("explicit t1 and readout fidelity override the chain values") {
        const EfficiencyBudget o =
            efficiency_budget(dev.chain, dev.cycle, sc, {1e-5, 2e-5}, {0.5, 0.25});
        CHECK(o.eta_q[0] == rel(eta_q(dev.cycle.t_d, 1e-5), 1e-12));
        CHECK(o.eta_q[1] == rel(eta_q(dev.cycle.t_d, 2e-5), 1e-12));
        CHECK(o.f_ro[0] == 0.5);
        CHECK(o.f_ro[1] == 0.25);
    }
}

TEST_CASE("power sensitivity follows the square-root dark-rate law") {
    CHECK(sensitivity(6.4, 0.25, 8.798e9) == rel(5.89916e-23, 1e-4));
    CHECK(sensitivity(0.12, 0.25, 8.798e9) == rel(8.0778e-24, 1e-4));
    CHECK(sensitivity(4.0 * 6.4, 0.25, 8.798e9) ==
          rel(2.0 * sensitivity(6.4, 0.25, 8.798e9), 1e-12));
    CHECK_THROWS_AS(sensitivity(1.0, 0.0, 8.798e9), Error);
}

TEST_CASE("NEP approaches the sensitivity at large dark-count number") {
    // alpha t = 1e4: ratio (1 + sqrt(1 + 4 alpha t)) / (2 sqrt(alpha t)).
    CHECK(nep(5.0, 0.25, 8.798e9, 2000.0) /
              sensitivity(5.0, 0.25, 8.798e9) ==
          rel(1.0050125, 1e-6));
    for (double at : {1e4, 1e6}) {
        const double t = at / 5.0;
        CHECK(nep(5.0, 0.25, 8.798e9, t) ==
              rel(sensitivity(5.0, 0.25, 8.798e9), 0.01));
    }
    CHECK_THROWS_AS(nep(1.0, 0.25, 8.798e9, 0.0), Error);
}

TEST_CASE("the NEP is exactly the unit-SNR power") {
    for (double alpha : {0.12, 5.0, 340.0}) {
        for (double t : {1e-3, 1.0, 3600.0}) {
            CAPTURE(alpha);
            CAPTURE(t);
            const double p = nep(alpha, 0.25, 8.798e9, t) / std::sqrt(t);
            CHECK(snr(p, 0.25, alpha, t, 8.798e9) == rel(1.0, 1e-9));
        }
    }
    CHECK(snr(0.0, 0.25, 0.0, 1.0, 8.798e9) == 0.0);
}

TEST_CASE("the sensitivity report is a composition of the scalar metrics") {
    const SensitivityReport r = sensitivity_report(6.4, 0.12, 0.25, 8.798e9, 100.0);
    CHECK(r.s_operational == rel(sensitivity(6.4, 0.25, 8.798e9), 1e-12));
    CHECK(r.s_intrinsic == rel(sensitivity(0.12, 0.25, 8.798e9), 1e-12));
    CHECK(r.nep_at_t == rel(nep(6.4, 0.25, 8.798e9, 100.0), 1e-12));
}

TEST_CASE("temperature sweeps follow K times occupation products plus offset") {
    const double n7 = thermal_occupation(0.050, 7e9);
    const double n6 = thermal_occupation(0.050, 6e9);
    CHECK(temperature_model(3.4e4, 0.03, 0.050, {7e9}) ==
          rel(3.4e4 * n7 + 0.03, 1e-12));
    CHECK(temperature_model(3.4e4, 0.0, 0.050, {7e9, 6e9}) ==
          rel(3.4e4 * n7 * n6, 1e-12));
    CHECK(temperature_model(3.4e4, 0.03, 0.0, {7e9}) == rel(0.03, 1e-12));
    CHECK_THROWS_AS(temperature_model(-1.0, 0.0, 0.05, {7e9}), Error);
    CHECK_THROWS_AS(temperature_model(1.0, 0.0, 0.05, {}), Error);
}
