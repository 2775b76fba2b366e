#pragma once

#include <cstddef>
#include <vector>

#include "csmpd/model.hpp"

namespace csmpd {

/// Pure state in the restricted detector subspace: every mode and qubit is a
/// two-level system, at most one photon anywhere. Basis index bits are
/// ordered (buffer, qubit0, memory, qubit1, ..., waste) from the most
/// significant bit down, so for N=2 the photon-in-buffer state is index
/// 0b10000 and the terminal double-flag state is 0b01010.
struct SubspaceState {
    std::vector<Complex> amplitudes;
    double time = 0.0;
};

SubspaceState vacuum_state(std::size_t n_stages);
SubspaceState photon_in_buffer(std::size_t n_stages);

/// Occupancies on a uniform time grid. mode_occupation is indexed
/// [mode][sample] in chain order; qubit_occupation likewise.
struct EvolutionTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> mode_occupation;
    std::vector<std::vector<double>> qubit_occupation;
    std::vector<double> total_probability;
};

/// Dense Lindblad evolution of the truncated (dimension <= 32) detector
/// space: coherent conversion on every stage plus decay channels on the
/// waste and on any lossy interior mode. The buffer acts as a closed
/// preparation cavity — its kappa is required to be zero here; scattering
/// chains with an open buffer port belong to evolve_linear_model, which
/// keeps full input-output bookkeeping.
///
/// dt is the output sample spacing and must resolve the fastest rate
/// (dt <= 0.05 / max rate); integration is adaptive underneath (embedded
/// Runge-Kutta by step doubling) with absolute tolerance abs_tol.
EvolutionTrace evolve_master_equation(const ChainSpec& chain,
                                      const SubspaceState& initial, double t_max,
                                      double dt, double abs_tol = 1e-10);

/// Optional coherent probe on the buffer port of the linear model:
/// unit-flux amplitude and probe detuning, constant in the rotating frame.
struct LinearDrive {
    Complex amplitude{0.0, 0.0};
    double detuning = 0.0;  // [rad/s]
};

/// Mode amplitudes on a uniform time grid, indexed [mode][sample].
struct AmplitudeTrace {
    std::vector<double> t;
    std::vector<std::vector<Complex>> amplitudes;
};

/// Integrates the N+1 coupled linear amplitude equations of the chain (the
/// semi-classical average-amplitude model): each mode decays at its full
/// kappa, stages couple through g4, and an optional drive feeds the buffer
/// through its external coupling. Same adaptive integrator as the master
/// equation. In the single-excitation sector the two models agree exactly;
/// that equivalence is this module's central test oracle.
AmplitudeTrace evolve_linear_model(const ChainSpec& chain,
                                   const std::vector<Complex>& initial,
                                   double t_max, double dt,
                                   const LinearDrive& drive = {},
                                   double abs_tol = 1e-10);

} // namespace csmpd
