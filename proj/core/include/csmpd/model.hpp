#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "csmpd/errors.hpp"

namespace csmpd {

using Complex = std::complex<double>;

enum class ModeRole { buffer, memory, waste, readout };

std::string to_string(ModeRole role);
ModeRole mode_role_from_string(const std::string& name);

/// One linear resonator of the chain. All rates are energy-decay rates [1/s],
/// omega is angular [rad/s].
struct ModeSpec {
    ModeRole role = ModeRole::memory;
    double omega = 0.0;
    double kappa_ext = 0.0;
    double kappa_int = 0.0;

    double kappa_total() const { return kappa_ext + kappa_int; }
};

/// One flag transmon. Dispersive shifts are signed (negative for transmons)
/// and angular; chi_left / chi_right shift the modes adjacent in the chain.
struct QubitSpec {
    double omega_ge = 0.0;     // [rad/s]
    double chi_self = 0.0;     // self-Kerr chi_qq [rad/s]
    double chi_left = 0.0;     // [rad/s]
    double chi_right = 0.0;    // [rad/s]
    double t1 = 0.0;           // [s]
    double t1_pumped = 0.0;    // [s], relaxation with the pump on
    double p_eq = 0.0;         // equilibrium excited population
    double p_eq_reset = 0.0;   // excited population right after reset
    double f_ro = 1.0;         // readout fidelity
};

/// Pump applied across one conversion stage.
struct PumpSpec {
    Complex xi{0.0, 0.0};      // dimensionless pump amplitude at the junction
    double delta_p = 0.0;      // detuning from the frequency-matching condition [rad/s]
};

/// Parametric coupling of one stage: g4 = -xi * sqrt(chi_left * chi_right).
/// Mixed-sign dispersive shifts make the root imaginary and are rejected as
/// configuration errors; either shift being zero degenerates the stage.
Complex coupling_strength(const QubitSpec& qubit, const PumpSpec& pump);

/// Full detector chain: N+1 modes, N qubits, N pumps, ordered from the buffer
/// (index 0) to the waste (index N).
struct ChainSpec {
    std::vector<ModeSpec> modes;
    std::vector<QubitSpec> qubits;
    std::vector<PumpSpec> pumps;

    std::size_t n_stages() const { return qubits.size(); }

    /// Throws ConfigError when the shape or any field invariant is violated.
    void validate() const;

    Complex g4(std::size_t stage) const;

    /// Adiabatic decay rate of interior mode `mode_index` back toward the
    /// input side, 4|g4_{k-1}|^2 / kappa_{k-1}.
    double gamma_backward(std::size_t mode_index) const;
    /// Adiabatic decay rate of interior mode `mode_index` toward the output
    /// side, 4|g4_k|^2 / kappa_{k+1}.
    double gamma_forward(std::size_t mode_index) const;

    /// N=2 shorthand: memory-to-buffer and memory-to-waste rates.
    double gamma_mb() const { return gamma_backward(1); }
    double gamma_mw() const { return gamma_forward(1); }
};

/// Detection-cycle timing. n_reset is the mean number of reset repetitions
/// per cycle (the measured count is conditional, hence fractional).
struct CycleSpec {
    double t_d = 0.0;       // detection window [s]
    double t_ro = 0.0;      // readout duration [s]
    double t_reset = 0.0;   // reset pulse duration [s]
    double n_reset = 0.0;

    /// Dead time per cycle: (n_reset+1) readouts plus n_reset reset pulses.
    double t_dead() const { return (n_reset + 1.0) * t_ro + n_reset * t_reset; }
    double t_cycle() const { return t_d + t_dead(); }

    void validate() const;
};

/// Fraction of the cycle spent detecting.
double eta_cycle(const CycleSpec& cycle);

/// Thermal environment. background_occupations maps frequency [Hz] to a mean
/// photon number override; absent frequencies fall back to Bose-Einstein.
struct Environment {
    double temperature = 0.0;  // [K]
    std::map<double, double> background_occupations;

    void validate() const;
};

} // namespace csmpd
