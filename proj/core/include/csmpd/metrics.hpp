#pragma once

#include <vector>

#include "csmpd/model.hpp"
#include "csmpd/scattering.hpp"

namespace csmpd {

/// Bose-Einstein mean photon number at temperature [K] and frequency [Hz].
/// Returns 0 at T = 0 without overflowing.
double thermal_occupation(double temperature, double frequency_hz);

/// Mean occupation seen by the detector: an explicit override in the
/// environment wins over Bose-Einstein at the given frequency.
double mean_occupation(const Environment& env, double frequency_hz);

/// Intrinsic dark-count rate of one flag qubit over the detection cycle,
/// linearized in t_d/t1: (p_eq - p_eq_reset)/t1 * eta_cycle + p_eq_reset/t_cycle.
/// The linearization is good to ~2% at t_d/t1 = 0.05 and degrades to ~12%
/// at 0.25.
double alpha_q(const QubitSpec& qubit, const CycleSpec& cycle);

/// Same quantity without the linearization: excited population integrated
/// over the window divided by the cycle length.
double alpha_q_exact(const QubitSpec& qubit, const CycleSpec& cycle);

/// Thermal dark-count rate eta * (kappa_d/4) * n_bar, kappa_d angular.
double alpha_th(double eta, double kappa_d, double n_bar);

/// Decomposed dark-count budget. alpha_pump and alpha_ro are empirical
/// inputs; alpha_q and alpha_th are derived. alpha_total is the exact sum.
struct NoiseBudget {
    double alpha_q = 0.0;
    double alpha_pump = 0.0;
    double alpha_ro = 0.0;
    double alpha_th = 0.0;
    double alpha_total = 0.0;
};

/// With one qubit, alpha_q is the single-flag rate. With two, a count needs
/// both flags up in the same cycle, so the intrinsic term is the correlated
/// pair rate (alpha_q0 t_cycle)(alpha_q1 t_cycle)/t_cycle.
NoiseBudget noise_budget(const std::vector<QubitSpec>& qubits, const CycleSpec& cycle,
                         double eta, double kappa_d, const Environment& env,
                         double buffer_frequency_hz, double alpha_pump,
                         double alpha_ro);

/// Window efficiency of one flag qubit: probability that a flag raised at a
/// uniformly random time in the window survives to readout,
/// (1 - e^{-t_d/t1}) * t1/t_d.
double eta_q(double t_d, double t1);

/// Solves e^x = x + 1 + r for the window fraction x = t_d/t1 that maximizes
/// eta_cycle * eta_q at dead-time ratio r = t_dead/t1 (bisection).
double optimal_window_fraction(double dead_time_ratio);

/// Multiplicative operational-efficiency budget of the full detector.
struct EfficiencyBudget {
    double eta_4wm = 1.0;
    double eta_m = 1.0;
    double eta_cycle = 1.0;
    std::vector<double> eta_q;  // per qubit
    std::vector<double> f_ro;   // per qubit
    double eta_total = 1.0;
};

/// Composes the budget from the scattering factorization, the duty cycle,
/// and per-qubit window/readout factors. t1s and f_ros override the chain's
/// own values when nonempty (the co-fit passes pump-dependent T1 values).
EfficiencyBudget efficiency_budget(const ChainSpec& chain, const CycleSpec& cycle,
                                   const ScatteringResult& scattering,
                                   const std::vector<double>& t1s = {},
                                   const std::vector<double>& f_ros = {});

/// Power sensitivity hbar*omega*sqrt(alpha)/eta [W/sqrt(Hz)].
double sensitivity(double alpha, double eta, double frequency_hz);

/// Noise-equivalent power at integration time t:
/// hbar*omega*(1+sqrt(1+4*alpha*t))/(2*eta*sqrt(t)) [W/sqrt(Hz)].
double nep(double alpha, double eta, double frequency_hz, double t);

/// Detection signal-to-noise ratio of a power P integrated for t seconds:
/// s/sqrt(s + d) with s = eta*P*t/(hbar*omega) and d = alpha*t.
double snr(double power_w, double eta, double alpha, double t, double frequency_hz);

struct SensitivityReport {
    double s_operational = 0.0;  // from the full dark-count rate
    double s_intrinsic = 0.0;    // from the detuned-pump residual rate
    double nep_at_t = 0.0;
};
SensitivityReport sensitivity_report(double alpha, double alpha_err, double eta,
                                     double frequency_hz, double t);

/// Thermal / intrinsic count-rate model for temperature sweeps:
/// K * prod_f n_bar(T, f) + c. One frequency gives the buffer-photon model,
/// two give the correlated-pair model.
double temperature_model(double coeff_k, double coeff_c, double temperature,
                         const std::vector<double>& frequencies_hz);

} // namespace csmpd
