#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csmpd/model.hpp"

namespace csmpd {

/// Per-cycle detector outcomes. Bit k of a word is flag qubit k (bit 0 is
/// qubit 0); cycle j starts at time j * t_cycle.
struct ClickTrace {
    std::uint64_t seed = 0;
    double t_cycle = 0.0;
    std::size_t n_qubits = 0;
    std::vector<std::uint32_t> outcomes;
    bool saturated = false;  ///< flux * t_d left the linear regime
};

/// Dispersive-readout model on the rotated quadrature: each qubit draws from
/// a Gaussian at its state's mean; shared sigma; two-threshold assignment.
struct IQReadoutModel {
    std::vector<double> mean_ground;
    std::vector<double> mean_excited;
    double sigma = 0.0;
    double v_th = 0.0;
    double v_th_reset = 0.0;
};

enum class DecodeScheme { all_or_nothing, majority };

struct DecodeResult {
    std::vector<bool> clicks;
    double count_rate = 0.0;  ///< clicks per second
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double intercept_err = 0.0;
};

/// Linear-response estimates from a flux sweep: slope = efficiency,
/// intercept = dark-count rate.
struct BenchmarkResult {
    std::vector<LineFit> per_qubit;
    LineFit decoded;
    double efficiency = 0.0;
    double efficiency_err = 0.0;
    double dark_rate = 0.0;
    double dark_rate_err = 0.0;
};

/// One conversion stage of the chain: the photon passes with probability
/// `conversion`; given that, the stage's flag registers with probability
/// `flag`. Keeping the two separate lets the flag-k marginal sit between the
/// cascaded product and the all-flags coincidence, as measured devices do.
struct StageModel {
    double conversion = 1.0;
    double flag = 1.0;
};

/// Probabilities driving one simulated cycle; all per-cycle numbers must be
/// small (the simulator allows at most one photon event per cycle).
struct CycleModel {
    std::vector<StageModel> stages;
    std::vector<double> intrinsic_flip;  ///< per-cycle excess excitation probability
    double t_d = 0.0;
    double t_cycle = 0.0;
    double thermal_rate = 0.0;  ///< detected (all-flags) thermal rate, 1/s

    std::size_t n_qubits() const { return stages.size(); }
    /// All-flags efficiency of the chain, the eta that divides thermal_rate
    /// back into an arrival probability.
    double coincidence_efficiency() const;
};

/// Stochastic cycle simulation. A signal photon arrives with probability
/// flux*t_d, else a thermal one with probability
/// thermal_rate/coincidence_efficiency*t_cycle; either climbs the conditional
/// stage chain; intrinsic flips are OR-ed on top.
ClickTrace simulate(const CycleModel& model, double photon_flux, double duration,
                    std::uint64_t seed);

class CounterRng;

enum class ReadoutOutcome { ground, excited };

struct ReadoutSample {
    ReadoutOutcome outcome = ReadoutOutcome::ground;
    int redraws = 0;
};

/// Three-branch policy: I >= v_th is excited, I <= v_th_reset is ground, the
/// band between triggers a re-read (capped at 10, then nearest mean decides).
ReadoutSample readout_sample(const IQReadoutModel& model, std::size_t qubit,
                             ReadoutOutcome true_state, CounterRng& rng);

/// Applies the readout model to every flag of a trace.
ClickTrace apply_readout(const ClickTrace& trace, const IQReadoutModel& model,
                         std::uint64_t seed);

/// Ground-biased threshold: minimizes P(I_g >= V) / P(I_e >= V)^2 over a grid
/// between the means; v_th_reset mirrors v_th about the equal-error midpoint.
void optimize_threshold(IQReadoutModel& model, std::size_t grid_points = 10001);

DecodeResult decode(const ClickTrace& trace, DecodeScheme scheme);

/// Weighted least-squares line through (flux, decoded count rate) with
/// Poisson weights; needs >= 3 flux points including zero.
BenchmarkResult estimate_benchmark(const std::vector<ClickTrace>& traces,
                                   const std::vector<double>& fluxes,
                                   DecodeScheme scheme = DecodeScheme::all_or_nothing);

std::string bitstring(std::uint32_t outcome, std::size_t n_qubits);

} // namespace csmpd
