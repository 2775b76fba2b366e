// Release gate: every headline number the toolkit is trusted for, checked
// end to end with pinned tolerances. One line per gate; exit code counts
// failures. Kept free of any test framework so the output reads as a
// checklist.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "csmpd/calibration.hpp"
#include "csmpd/config.hpp"
#include "csmpd/constants.hpp"
#include "csmpd/dynamics.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/metrics.hpp"
#include "csmpd/model.hpp"
#include "csmpd/montecarlo.hpp"
#include "csmpd/scattering.hpp"

namespace {

using namespace csmpd;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

/// Collects failed conditions for one gate; passes silently otherwise.
struct Gate {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& why) {
        if (cond) return;
        ok = false;
        append(why);
    }
    void note(const std::string& what) {
        if (ok) append(what);
    }

private:
    void append(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

// --- 1. lossless chains at critical coupling convert perfectly ------------

Gate conversion_optimum() {
    Gate g;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const char* name : {"lossless-n1", "lossless-n2"}) {
        const ChainSpec chain = fixture_device(name).chain;
        worst = std::max(worst, std::abs(std::norm(s21(chain, 0.0)) - 1.0));
    }
    const double secs = seconds_since(t0);
    g.require(worst <= 1e-9, fmt("worst |1 - T(0)| = %.3g > 1e-9", worst));
    g.require(secs < 1.0, fmt("solver needed %.2f s, budget 1 s", secs));
    g.note(fmt("worst |1 - T(0)| = %.2g in %.3f s", worst, secs));
    return g;
}

// --- 2. fitted operating point reproduces the headline numbers ------------

Gate operating_point() {
    Gate g;
    const ChainSpec chain =
        two_stage_chain(5.8e6, 0.0, 0.0, 3.7e5, 3.36e6, 0.0,
                        {-hz_to_angular(130e3), 0.0},
                        {-hz_to_angular(125e3), 0.0});
    const ScatteringResult r =
        compute_scattering(chain, -hz_to_angular(1e6), hz_to_angular(1e6), 41);
    g.require(std::abs(r.cooperativity - 0.62) <= 0.02,
              fmt("C = %.4f outside 0.62 +- 0.02", r.cooperativity));
    g.require(std::abs(r.eta_4wm - 0.95) <= 0.01,
              fmt("eta_4wm = %.4f outside 0.95 +- 0.01", r.eta_4wm));
    g.require(std::abs(r.eta_m - 0.58) <= 0.02,
              fmt("eta_m = %.4f outside 0.58 +- 0.02", r.eta_m));
    const double kd_hz = angular_to_hz(r.kappa_d);
    g.require(std::abs(kd_hz - 249e3) <= 0.5e3,
              fmt("kappa_d = %.0f Hz, expected 249 kHz", kd_hz));
    g.require(std::abs(kd_hz / 240e3 - 1.0) <= 0.10,
              fmt("kappa_d = %.0f Hz misses the measured 240 kHz by > 10%%",
                  kd_hz));
    g.note(fmt("C = %.3f, eta_4wm = %.3f, eta_m = %.3f, kappa_d = %.1f kHz",
               r.cooperativity, r.eta_4wm, r.eta_m, kd_hz / 1e3));
    return g;
}

// --- 3. efficiency budget multiplies out to the quoted total --------------

Gate efficiency_budget_product() {
    Gate g;
    const DeviceConfig dev = fixture_device("reference");
    const ScatteringResult sc = compute_scattering(
        dev.chain, -hz_to_angular(2e6), hz_to_angular(2e6), 101);
    const EfficiencyBudget b = efficiency_budget(dev.chain, dev.cycle, sc);
    double product = b.eta_4wm * b.eta_m * b.eta_cycle;
    for (double e : b.eta_q) product *= e;
    for (double f : b.f_ro) product *= f;
    g.require(std::abs(product / b.eta_total - 1.0) <= 1e-12,
              "factors do not multiply to eta_total");
    g.require(std::abs(b.eta_total / 0.175 - 1.0) <= 0.02,
              fmt("eta_total = %.5f is > 2%% from 0.175", b.eta_total));
    g.require(std::abs(b.eta_total - 0.18) <= 0.01,
              fmt("eta_total = %.5f not within 0.01 of 0.18", b.eta_total));
    g.note(fmt("eta_total = %.4f", b.eta_total));
    return g;
}

// --- 4. dark-count-limited sensitivity ------------------------------------

Gate sensitivity_numbers() {
    Gate g;
    const double s_op = sensitivity(6.4, 0.25, 8.798e9);
    g.require(std::abs(s_op / 5.9e-23 - 1.0) <= 0.02,
              fmt("S(6.4/s) = %.4g W/sqrt(Hz), expected 5.9e-23 +- 2%%", s_op));
    const double s_in = sensitivity(0.12, 0.25, 8.798e9);
    g.require(std::abs(s_in / 8.1e-24 - 1.0) <= 0.02,
              fmt("S(0.12/s) = %.4g W/sqrt(Hz), expected 8.1e-24 +- 2%%", s_in));
    g.require(s_in >= 7e-24 && s_in <= 9e-24,
              fmt("S(0.12/s) = %.4g outside (8 +- 1)e-24", s_in));
    g.note(fmt("S = %.3g and %.3g W/sqrt(Hz)", s_op, s_in));
    return g;
}

// --- 5. drive-line calibration: photons per second and picked-up power ----

Gate drive_calibration() {
    Gate g;
    const DriveCalibration d = photon_flux_from_drive(
        hz_to_angular(92.6e3), 5.8e6, 0.0, hz_to_angular(8.798e9));
    g.require(std::abs(d.photon_flux / 58522.0 - 1.0) <= 0.02,
              fmt("flux = %.1f /s, expected 58522 +- 2%%", d.photon_flux));
    g.require(std::abs(d.power / 341e-21 - 1.0) <= 0.02,
              fmt("power = %.4g W, expected 341 zW +- 2%%", d.power));
    g.note(fmt("%.0f photons/s, %.1f zW", d.photon_flux, d.power * 1e21));
    return g;
}

// --- 6. thermal dark-count prefactor --------------------------------------

Gate thermal_prefactor() {
    Gate g;
    const double k_th = alpha_th(0.10, hz_to_angular(216e3), 1.0);
    g.require(k_th >= 3.1e4 && k_th <= 3.5e4,
              fmt("eta*kappa_d/4 = %.3g /s outside (3.3 +- 0.2)e4", k_th));
    g.note(fmt("K_th = %.3g /s", k_th));
    return g;
}

// --- 7. qubit-noise rate at typical parameters ----------------------------

Gate qubit_noise_rate() {
    Gate g;
    QubitSpec q;
    q.t1 = 50e-6;
    q.p_eq = 1e-3;
    q.p_eq_reset = 1e-5;
    for (double n_reset : {0.0, 1.0}) {
        CycleSpec cycle;
        cycle.t_d = 10e-6;
        cycle.t_ro = 1e-6;
        cycle.t_reset = 100e-9;
        cycle.n_reset = n_reset;
        const double a = alpha_q(q, cycle);
        g.require(a >= 17.0 && a <= 19.0,
                  fmt("alpha_q = %.3f /s (n_reset = %g) outside 17-19", a,
                      n_reset));
        g.require(std::abs(a / 20.0 - 1.0) <= 0.20,
                  fmt("alpha_q = %.3f /s more than 20%% from 20 /s", a));
        g.note(fmt("alpha_q(n_reset=%g) = %.2f /s", n_reset, a));
    }
    return g;
}

// --- 8. bandwidth closed form against the numeric FWHM --------------------

Gate bandwidth_analytics() {
    Gate g;
    std::mt19937_64 rng(6021023);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double kb_ext = 1e5 * std::pow(100.0, uni(rng));
        const double kb_int = 0.2 * kb_ext * uni(rng);
        const double kb = kb_ext + kb_int;
        const double kw_ext = kb * 0.2 * std::pow(25.0, uni(rng));
        const double kw_int = 0.2 * kw_ext * uni(rng);
        const double kw = kw_ext + kw_int;
        const double c = 0.05 + 0.75 * uni(rng);
        const double gg = std::sqrt(c * kb * kw) / 2.0;
        const ChainSpec chain =
            single_stage_chain(kb_ext, kb_int, kw_ext, kw_int, {-gg, 0.0});
        const double closed = bandwidth(chain, BandwidthMethod::analytic_n1);
        const double numeric = bandwidth(chain, BandwidthMethod::numeric_fwhm);
        worst = std::max(worst, std::abs(numeric / closed - 1.0));
    }
    g.require(worst <= 1e-6,
              fmt("closed form vs numeric FWHM off by %.3g relative", worst));

    // Far-overcoupled waste at critical coupling: the linewidth collapses
    // onto twice the buffer output rate.
    double worst_asym = 0.0;
    for (double ratio : {50.0, 100.0, 400.0}) {
        const double kb = 1e6;
        const double kw = ratio * kb;
        const ChainSpec chain = single_stage_chain(
            kb, 0.0, kw, 0.0, {-std::sqrt(kb * kw) / 2.0, 0.0});
        const double kd = bandwidth(chain, BandwidthMethod::analytic_n1);
        worst_asym = std::max(worst_asym, std::abs(kd / (2.0 * kb) - 1.0));
    }
    g.require(worst_asym <= 0.03,
              fmt("kappa_d misses 2 kappa_b by %.3g", worst_asym));
    g.note(fmt("closed-vs-numeric %.2g, asymptote within %.4f", worst,
               worst_asym));
    return g;
}

// --- 9. quantum and semi-classical pictures agree -------------------------

Gate quantum_semiclassical() {
    Gate g;
    const auto compare = [&g](const ChainSpec& chain, double t_max, double dt,
                              const char* tag) {
        const auto t0 = Clock::now();
        const EvolutionTrace me = evolve_master_equation(
            chain, photon_in_buffer(chain.n_stages()), t_max, dt);
        std::vector<Complex> init(chain.modes.size(), {0.0, 0.0});
        init[0] = 1.0;
        const AmplitudeTrace lin =
            evolve_linear_model(chain, init, t_max, dt, {});
        double worst = 0.0;
        for (std::size_t k = 0; k < chain.modes.size(); ++k)
            for (std::size_t i = 0; i < me.t.size(); ++i)
                worst = std::max(worst,
                                 std::abs(me.mode_occupation[k][i] -
                                          std::norm(lin.amplitudes[k][i])));
        const double secs = seconds_since(t0);
        g.require(worst <= 1e-8,
                  fmt("%s: occupancy vs squared amplitude off by %.3g", tag,
                      worst));
        g.require(secs < 10.0, fmt("%s: %.1f s, budget 10 s", tag, secs));
        g.note(fmt("%s gap %.2g (%.1f s)", tag, worst, secs));
    };
    compare(two_stage_chain(0.0, 0.0, 0.0, 0.0, 1.9e7, 0.0, {-6.008e5, 0.0},
                            {-1.9e6, 0.0}),
            5e-6, 2.5e-9, "N=2");
    compare(single_stage_chain(0.0, 0.0, 7.6e5, 0.0, {-3.8e5, 0.0}), 10e-6,
            1e-8, "N=1");

    // Driven steady state against the frequency-domain solution.
    const ChainSpec ref = fixture_device("reference").chain;
    const double kw_ext = ref.modes.back().kappa_ext;
    double worst_ss = 0.0;
    for (double delta : {0.0, 5e5, -1.2e6}) {
        std::vector<Complex> zeros(ref.modes.size(), {0.0, 0.0});
        const AmplitudeTrace tr = evolve_linear_model(
            ref, zeros, 60e-6, 4e-9, {{1.0, 0.0}, delta});
        const double out = kw_ext * std::norm(tr.amplitudes.back().back());
        const double want = std::norm(s21(ref, delta));
        worst_ss = std::max(worst_ss, std::abs(out / want - 1.0));
    }
    g.require(worst_ss <= 1e-6,
              fmt("steady-state transmission off by %.3g relative", worst_ss));
    g.note(fmt("steady state within %.2g", worst_ss));
    return g;
}

// --- 10. conversion regimes across the coupling hierarchy -----------------

Gate conversion_regimes() {
    Gate g;
    // Closed buffer prepared with one photon; g1 fixed, g0 sets the regime.
    const auto regime_chain = [](double g0) {
        return two_stage_chain(0.0, 0.0, 0.0, 0.0, 1.9e7, 0.0, {-g0, 0.0},
                               {-1.9e6, 0.0});
    };
    const double dt = 2.6e-9;

    // Critical coupling: the detection flag rises monotonically and the
    // cycle ends with both flags up almost surely.
    {
        const EvolutionTrace tr = evolve_master_equation(
            regime_chain(6.008e5), photon_in_buffer(2), 26.3e-6, dt);
        const auto& q1 = tr.qubit_occupation[1];
        // Peak-to-trough drawdown. At the memory-amplitude nodes the waste
        // briefly back-converts, denting the curve by ~1e-5 — four orders
        // below the swings of the non-monotone regimes, so that is the
        // resolution at which "monotone" is asserted.
        double drawdown = 0.0;
        double peak = q1.front();
        for (double v : q1) {
            peak = std::max(peak, v);
            drawdown = std::max(drawdown, peak - v);
        }
        g.require(drawdown <= 2e-5,
                  fmt("matched: flag curve drops by %.3g", drawdown));
        const double pand = q1.back();
        g.require(tr.qubit_occupation[0].back() >= 0.99 && pand >= 0.99,
                  fmt("matched: terminal double-flag %.4f < 0.99", pand));
        g.note(fmt("matched: double-flag %.4f", pand));
    }

    // Strong coupling: back-conversion beats the drain, populations swing.
    {
        const EvolutionTrace tr = evolve_master_equation(
            regime_chain(1.9e6), photon_in_buffer(2), 15e-6, dt);
        const auto& q0 = tr.qubit_occupation[0];
        const auto& nb = tr.mode_occupation[0];
        double drop = 0.0, peak = q0.front();
        double revival = 0.0, trough = nb.front();
        for (std::size_t i = 0; i < q0.size(); ++i) {
            peak = std::max(peak, q0[i]);
            drop = std::max(drop, peak - q0[i]);
            trough = std::min(trough, nb[i]);
            revival = std::max(revival, nb[i] - trough);
        }
        g.require(drop > 0.02,
                  fmt("strong: largest flag drop %.3g, expected swings", drop));
        g.require(revival > 0.02,
                  fmt("strong: buffer revival %.3g, expected swings", revival));
        g.note(fmt("strong: flag swings by %.2f", drop));
    }

    // Weak coupling: the first conversion is the bottleneck (time constant
    // 5.3 us), so both flag curves crawl up together once its first few
    // time constants have passed.
    {
        const EvolutionTrace tr = evolve_master_equation(
            regime_chain(1.9e5), photon_in_buffer(2), 40e-6, dt);
        double worst_gap = 0.0;
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            if (tr.t[i] < 17e-6) continue;
            const double q0 = tr.qubit_occupation[0][i];
            const double q1 = tr.qubit_occupation[1][i];
            worst_gap = std::max(worst_gap,
                                 std::abs(q0 - q1) / std::max(q0, q1));
        }
        g.require(worst_gap <= 0.02,
                  fmt("weak: flag curves apart by %.3g relative", worst_gap));
        g.note(fmt("weak: curves within %.4f", worst_gap));
    }
    return g;
}

// --- 11. Monte Carlo recovers what it was configured with -----------------

Gate monte_carlo_consistency() {
    Gate g;
    const auto t0 = Clock::now();

    CycleModel model;
    model.stages = {{1.0, 0.5}, {1.0, 0.44}};
    model.intrinsic_flip = {0.0, 0.0};
    model.t_d = 1e-5;
    model.t_cycle = 1e-5;
    model.thermal_rate = 5.0;

    const std::vector<double> fluxes = {0.0, 100.0, 200.0, 400.0, 600.0};
    std::vector<ClickTrace> traces;
    for (std::size_t i = 0; i < fluxes.size(); ++i)
        traces.push_back(simulate(model, fluxes[i], 2.0, 101 + i));
    const BenchmarkResult b = estimate_benchmark(traces, fluxes);
    g.require(b.efficiency_err > 0.0 && b.dark_rate_err > 0.0,
              "degenerate benchmark errors");
    g.require(std::abs(b.efficiency - 0.22) <= 3.0 * b.efficiency_err,
              fmt("efficiency %.4f +- %.4f not within 3 sigma of 0.22",
                  b.efficiency, b.efficiency_err));
    g.require(std::abs(b.dark_rate - 5.0) <= 3.0 * b.dark_rate_err,
              fmt("dark rate %.2f +- %.2f not within 3 sigma of 5 /s",
                  b.dark_rate, b.dark_rate_err));

    // Residual qubit excitation alone, AND-decoded over 1e7 cycles.
    CycleModel quiet = model;
    quiet.intrinsic_flip = {2.6e-3, 3.1e-3};
    quiet.thermal_rate = 0.0;
    const ClickTrace dark = simulate(quiet, 0.0, 100.0, 404);
    const DecodeResult dec = decode(dark, DecodeScheme::all_or_nothing);
    std::size_t count = 0;
    for (bool c : dec.clicks) count += c;
    const double p_false = 2.6e-3 * 3.1e-3;  // 8.06e-6 per cycle
    const double n_cycles = static_cast<double>(dark.outcomes.size());
    const double mean = n_cycles * p_false;
    const double three_sigma =
        3.0 * std::sqrt(n_cycles * p_false * (1.0 - p_false));
    g.require(n_cycles == 1e7, fmt("expected 1e7 cycles, got %.0f", n_cycles));
    g.require(std::abs(static_cast<double>(count) - mean) <= three_sigma,
              fmt("false positives: %zu vs %.1f +- %.1f", count, mean,
                  three_sigma));

    const double secs = seconds_since(t0);
    g.require(secs < 60.0, fmt("%.1f s, budget 60 s", secs));
    g.note(fmt("eff %.3f, dark %.1f /s, %zu false positives (%.1f s)",
               b.efficiency, b.dark_rate, count, secs));
    return g;
}

// --- 12. decoder truth table against the closed forms ---------------------

Gate decoder_enumeration() {
    Gate g;
    const auto weight = [](double q, std::uint32_t w) {
        double p = 1.0;
        for (int b = 0; b < 3; ++b) p *= (w >> b & 1u) ? q : 1.0 - q;
        return p;
    };
    const auto decoded = [&](DecodeScheme scheme, double q) {
        double total = 0.0;
        for (std::uint32_t w = 0; w < 8; ++w) {
            ClickTrace t;
            t.t_cycle = 1e-5;
            t.n_qubits = 3;
            t.outcomes = {w};
            if (decode(t, scheme).clicks[0]) total += weight(q, w);
        }
        return total;
    };

    for (double q : {0.3, 0.62, 0.9}) {
        const double maj = 3.0 * q * q * (1.0 - q) + q * q * q;
        g.require(std::abs(decoded(DecodeScheme::majority, q) - maj) <=
                      1e-14 * maj,
                  fmt("majority efficiency mismatch at eta = %.2f", q));
        g.require(std::abs(decoded(DecodeScheme::all_or_nothing, q) -
                           q * q * q) <= 1e-14,
                  fmt("unanimous efficiency mismatch at eta = %.2f", q));
    }

    // Same enumeration with a per-qubit false-click probability: the leading
    // order is 3p^2. Swapping p^3 for (1-p)^3 makes the expression O(1), so
    // the enumeration pins down which closed form is the real one.
    for (double p : {1e-3, 1e-4}) {
        const double en = decoded(DecodeScheme::majority, p);
        const double closed = 3.0 * p * p * (1.0 - p) + p * p * p;
        g.require(std::abs(en - closed) <= 1e-14 * closed,
                  fmt("dark enumeration mismatch at p = %g", p));
        g.require(std::abs(en / (3.0 * p * p) - 1.0) <= p,
                  fmt("dark leading order is not 3p^2 at p = %g", p));
        const double swapped =
            3.0 * p * p * (1.0 - p) + std::pow(1.0 - p, 3.0);
        g.require(std::abs(swapped - en) > 0.9,
                  fmt("swapped-cube variant not excluded at p = %g", p));
    }
    g.note("majority = 3p^2(1-p) + p^3 exactly");
    return g;
}

// --- 13. noise-equivalent power closes on the sensitivity -----------------

Gate nep_identities() {
    Gate g;
    const double eta = 0.25;
    const double f = 8.798e9;
    double worst = 0.0;
    for (double alpha : {0.12, 5.0, 340.0})
        for (double at : {1e4, 1e5, 1e7}) {
            const double t = at / alpha;
            const double ratio = nep(alpha, eta, f, t) / sensitivity(alpha, eta, f);
            worst = std::max(worst, std::abs(ratio - 1.0));
        }
    g.require(worst <= 0.01,
              fmt("NEP vs sensitivity apart by %.3g for alpha*t >= 1e4", worst));

    double worst_rt = 0.0;
    for (double alpha : {0.12, 5.0, 340.0})
        for (double t : {1e-3, 1.0, 3600.0}) {
            const double p = nep(alpha, eta, f, t) / std::sqrt(t);
            worst_rt = std::max(worst_rt,
                                std::abs(snr(p, eta, alpha, t, f) - 1.0));
        }
    g.require(worst_rt <= 1e-9,
              fmt("snr(NEP) round trip off by %.3g", worst_rt));
    g.note(fmt("long-time gap %.2g, round trip %.2g", worst, worst_rt));
    return g;
}

// --- 14. every fit family recovers its generating parameters --------------

Gate fit_recovery() {
    Gate g;
    FitOptions opts;
    opts.max_iterations = 40000;
    opts.restarts = 6;
    opts.tolerance = 1e-15;
    opts.bootstrap_resamples = 0;

    const auto check_param = [&g](const char* family, const char* name,
                                  double got, double want, double tol) {
        g.require(std::abs(got / want - 1.0) <= tol,
                  fmt("%s: %s = %.8g vs %.8g (tol %g)", family, name, got,
                      want, tol));
    };

    {
        const double a = 0.97, tau = 23e-6, c = 0.02;
        std::vector<double> x(21), y(21);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = 5e-6 * static_cast<double>(i);
            y[i] = a * std::exp(-x[i] / tau) + c;
        }
        const ScalarModel decay = [](const std::vector<double>& p, double t) {
            return p[0] * std::exp(-t / p[1]) + p[2];
        };
        const double inf = std::numeric_limits<double>::infinity();
        const FitReport r =
            fit(decay, x, y, {"amplitude", "tau", "offset"},
                {0.8, 30e-6, 0.0}, {0.0, 1e-9, -inf}, {inf, inf, inf}, opts);
        check_param("decay", "amplitude", r.estimates[0], a, 1e-6);
        check_param("decay", "tau", r.estimates[1], tau, 1e-6);
        check_param("decay", "offset", r.estimates[2], c, 1e-6);
    }

    {
        const double chi = -hz_to_angular(1.784e6);
        const double kappa_b = 5.8e6;
        const double eps = hz_to_angular(92.6e3);
        const double offset = hz_to_angular(20e3);
        std::vector<StarkDataPoint> data(61);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double delta =
                -hz_to_angular(1.5e6) +
                hz_to_angular(3e6) * static_cast<double>(i) / 60.0;
            const Complex resp = ac_stark_model(chi, kappa_b, eps,
                                                delta + offset);
            data[i] = {delta, resp.real(), resp.imag()};
        }
        const FitReport r = stark_fit(
            data, kappa_b, {-hz_to_angular(1.5e6), hz_to_angular(80e3), 0.0},
            opts);
        check_param("stark", "chi", r.estimates[0], chi, 1e-6);
        check_param("stark", "eps", r.estimates[1], eps, 1e-6);
        check_param("stark", "offset", r.estimates[2], offset, 1e-6);
    }

    {
        const double coeff_k = 3.4e4, coeff_c = 2e3;
        std::vector<double> temps(19), rate(19);
        for (std::size_t i = 0; i < temps.size(); ++i) {
            temps[i] = 0.03 + 0.005 * static_cast<double>(i);
            rate[i] = temperature_model(coeff_k, coeff_c, temps[i], {7e9});
        }
        const ScalarModel therm = [](const std::vector<double>& p, double t) {
            return temperature_model(p[0], p[1], t, {7e9});
        };
        const double inf = std::numeric_limits<double>::infinity();
        const FitReport r = fit(therm, temps, rate, {"K", "offset"},
                                {2e4, 1e3}, {0.0, 0.0}, {inf, inf}, opts);
        check_param("temperature", "K", r.estimates[0], coeff_k, 1e-6);
        check_param("temperature", "offset", r.estimates[1], coeff_c, 1e-6);
    }

    {
        const double g40 = -hz_to_angular(130e3);
        const double g41 = -hz_to_angular(125e3);
        const double kappa_m = 3.7e5;
        CofitFixed fixed;
        fixed.t_d = 13e-6;
        fixed.eta_cycle = 0.780066;
        fixed.f_ro0 = 0.84;
        fixed.f_ro1 = 0.88;
        fixed.kappa_b_ext = 5.8e6;
        fixed.kappa_w_ext = 3.36e6;
        EfficiencyCurves curves;
        for (int i = 0; i < 9; ++i) {
            const double amp = 0.4 + 0.1 * i;
            curves.amplitude.push_back(amp);
            fixed.t1_q0.push_back(30e-6 - 5e-6 * amp);
            fixed.t1_q1.push_back(15e-6 - 3e-6 * amp);
            const CofitPoint pt = cofit_forward_model(
                fixed, amp, fixed.t1_q0.back(), fixed.t1_q1.back(), g40, g41,
                kappa_m);
            curves.eta_q0.push_back(pt.eta_q0);
            curves.eta_q1.push_back(pt.eta_q1);
            curves.eta_and.push_back(pt.eta_and);
        }
        const std::vector<double> guess = {-hz_to_angular(110e3),
                                           -hz_to_angular(100e3), 3e5};
        const FitReport clean = efficiency_cofit(curves, fixed, guess, opts);
        check_param("cofit", "g40", clean.estimates[0], g40, 1e-6);
        check_param("cofit", "g41", clean.estimates[1], g41, 1e-6);
        check_param("cofit", "kappa_m", clean.estimates[2], kappa_m, 1e-6);

        EfficiencyCurves noisy = curves;
        std::mt19937 gen(77);
        std::normal_distribution<double> nrm(0.0, 1.0);
        const auto jitter = [&](std::vector<double>& v) {
            for (double& y : v) y *= 1.0 + 0.02 * nrm(gen);
        };
        jitter(noisy.eta_q0);
        jitter(noisy.eta_q1);
        jitter(noisy.eta_and);
        FitOptions noisy_opts = opts;
        noisy_opts.max_iterations = 20000;
        noisy_opts.restarts = 4;
        const FitReport r = efficiency_cofit(noisy, fixed, guess, noisy_opts);
        check_param("noisy cofit", "g40", r.estimates[0], g40, 0.05);
        check_param("noisy cofit", "g41", r.estimates[1], g41, 0.05);
        check_param("noisy cofit", "kappa_m", r.estimates[2], kappa_m, 0.05);
    }
    g.note("all four families recovered");
    return g;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Gate (*run)();
    };
    const Entry entries[] = {
        {1, "critical-coupling conversion optimum", conversion_optimum},
        {2, "fitted operating point", operating_point},
        {3, "efficiency budget product", efficiency_budget_product},
        {4, "dark-count-limited sensitivity", sensitivity_numbers},
        {5, "drive-line photon-flux calibration", drive_calibration},
        {6, "thermal dark-count prefactor", thermal_prefactor},
        {7, "qubit-noise rate worked example", qubit_noise_rate},
        {8, "bandwidth closed form and asymptote", bandwidth_analytics},
        {9, "quantum vs semi-classical agreement", quantum_semiclassical},
        {10, "conversion regimes by cooperativity", conversion_regimes},
        {11, "Monte Carlo benchmark recovery", monte_carlo_consistency},
        {12, "decoder truth-table enumeration", decoder_enumeration},
        {13, "noise-equivalent-power identities", nep_identities},
        {14, "fit-family parameter recovery", fit_recovery},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        Gate gate;
        const auto t0 = Clock::now();
        try {
            gate = e.run();
        } catch (const std::exception& ex) {
            gate.ok = false;
            gate.detail = std::string("exception: ") + ex.what();
        }
        const double secs = seconds_since(t0);
        std::printf("[%s] %2d. %s%s%s [%.2f s]\n", gate.ok ? "PASS" : "FAIL",
                    e.id, e.name, gate.detail.empty() ? "" : ": ",
                    gate.detail.c_str(), secs);
        std::fflush(stdout);
        if (!gate.ok) ++failures;
    }
    const int total = static_cast<int>(std::size(entries));
    std::printf("%d/%d gates passed\n", total - failures, total);
    return failures;
}
