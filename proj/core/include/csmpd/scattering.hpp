#pragma once

#include <cstddef>
#include <vector>

#include "csmpd/model.hpp"

namespace csmpd {

/// Steady-state mode amplitudes for a unit-flux probe on the buffer port at
/// probe detuning delta, plus the transmission amplitude out of the waste.
struct SolveResult {
    std::vector<Complex> psi;
    Complex s21;
};

/// Solves the (N+1)-mode tridiagonal steady-state system in linear time
/// (forward elimination, back substitution). The diagonal stacks the pump
/// detunings: mode k sits at cumulative detuning sum of the upstream
/// delta_p, so a fully matched chain has every mode on resonance.
SolveResult solve_single_excitation(const ChainSpec& chain, double delta);

/// Transmission amplitude buffer -> waste at probe detuning delta.
Complex s21(const ChainSpec& chain, double delta);

/// Amplitude into the memory loss channel (interior mode `mode_index`),
/// normalized like s21: |.|^2 is the energy transmission into that loss
/// port. Defined for interior modes with kappa > 0.
Complex s_loss(const ChainSpec& chain, double delta, std::size_t mode_index = 1);

/// Chain cooperativity via the back-to-front recursion
///   Gamma_{N-1} = 4|g_{N-1}|^2 / kappa_N,
///   Gamma_k     = 4|g_k|^2 / (kappa_{k+1} + Gamma_{k+1}),
///   C           = Gamma_0 / kappa_0.
/// With lossless_memories (the default, and the convention behind the
/// quoted C values) the interior kappa_{k+1} terms are dropped, which for
/// N=2 reduces to C = (kappa_w/kappa_b)|g0/g1|^2.
double cooperativity(const ChainSpec& chain, bool lossless_memories = true);

/// Conversion efficiency 4c/(1+c)^2: peaks at c=1, symmetric under c -> 1/c.
double eta_4wm(double c);

/// Survival probability of the converted photon against memory loss:
/// ((gamma_mb+gamma_mw)/(kappa_m+gamma_mb+gamma_mw))^2.
double memory_efficiency(double gamma_mb, double gamma_mw, double kappa_m);

enum class BandwidthMethod {
    analytic_n1,   // exact closed-form FWHM of the two-mode lineshape
    approx_sum,    // adiabatic rate sum kappa_m + gamma_mb + gamma_mw (N=2)
    numeric_fwhm,  // golden-section peak + bisected half-maximum crossings
};

/// FWHM of |S21(delta)|^2 in angular units. numeric_fwhm refuses responses
/// with several maxima above half of the global one (MultiPeakError) and
/// flat responses. analytic_n1 requires N=1, approx_sum requires N=2.
double bandwidth(const ChainSpec& chain, BandwidthMethod method);

/// Sampled response plus the headline scalars derived from the same chain.
/// eta_4wm and eta_m are the factorized conversion and memory-survival
/// efficiencies; their product equals peak_transmission for matched chains.
struct ScatteringResult {
    std::vector<double> delta_grid;   // [rad/s]
    std::vector<Complex> s21;
    double peak_transmission = 0.0;   // |S21|^2 at delta = 0
    double eta_4wm = 0.0;             // 4C/(1+C)^2
    double eta_m = 1.0;
    double cooperativity = 0.0;
    double kappa_d = 0.0;             // [rad/s]
};

/// Evaluates the response on a uniform grid of n_points detunings. The
/// bandwidth method defaults per chain size: exact closed form for N=1, the
/// adiabatic rate sum for N=2 (the convention behind the quoted detection
/// bandwidth), numeric FWHM otherwise.
ScatteringResult compute_scattering(const ChainSpec& chain, double delta_min,
                                    double delta_max, std::size_t n_points);
ScatteringResult compute_scattering(const ChainSpec& chain, double delta_min,
                                    double delta_max, std::size_t n_points,
                                    BandwidthMethod method);

enum class PulseEnvelope { rectangular };

/// Efficiency for a photon arriving in a finite window of length t_d:
/// |(S21 convolved with the normalized envelope transform)(0)|^2, computed
/// by trapezoidal quadrature on the sampled grid. The grid must resolve the
/// envelope transform: spacing <= 2pi/(10 t_d), else GridError.
double pulse_filtered_efficiency(const ScatteringResult& scattering, double t_d,
                                 PulseEnvelope envelope = PulseEnvelope::rectangular);

/// Closed-form pulse-filtered energy transmissions of a matched N=2 chain
/// (pole decomposition of the cubic response denominator; no grid). Used by
/// the efficiency co-fit where the grid path would dominate the run time.
struct FilteredTransmission {
    double to_waste = 0.0;        // filtered |S21|^2
    double to_memory_loss = 0.0;  // filtered transmission into the memory loss port
};
FilteredTransmission pulse_filtered_transmissions(const ChainSpec& chain, double t_d);

/// The two pump-resonance conditions of an N=2 chain in the
/// (delta_p1, delta_p0) detuning plane, written delta_p0 = slope*delta_p1 +
/// intercept, plus the matched absolute pump frequencies from the
/// frequency-matching condition (Stark-corrected by -2|xi|^2 chi_self).
struct ResonanceLine {
    double slope = 0.0;
    double intercept = 0.0;  // [rad/s]
};
struct PumpResonanceLines {
    ResonanceLine first_stage;  // delta_p0 = 0, independent of delta_p1
    ResonanceLine cascade;      // delta_p0 + delta_p1 = 0, slope -1
    double omega_p0 = 0.0;      // [rad/s]
    double omega_p1 = 0.0;      // [rad/s]
};
PumpResonanceLines pump_resonance_lines(const ChainSpec& chain);

} // namespace csmpd
