#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csmpd/model.hpp"

namespace csmpd {

struct FitOptions {
    std::size_t max_iterations = 4000;  ///< per simplex run
    std::size_t restarts = 3;          ///< extra runs from perturbed guesses
    std::size_t bootstrap_resamples = 200;
    std::uint64_t seed = 0;
    double tolerance = 1e-12;  ///< relative simplex-size stopping criterion
};

struct FitReport {
    std::vector<std::string> names;
    std::vector<double> estimates;
    std::vector<double> errors;  ///< bootstrap standard errors
    std::vector<bool> well_determined;
    double rss = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Maps parameters to a residual vector; the engine minimizes the weighted
/// sum of squares. The residual count must not depend on the parameters.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Derivative-free least squares: Nelder-Mead with restarts, box bounds by
/// projection, bootstrap (residual resampling) standard errors. Deterministic
/// for a fixed options.seed.
FitReport fit_residuals(const ResidualFn& residuals,
                        const std::vector<std::string>& names,
                        const std::vector<double>& guess,
                        const std::vector<double>& lower,
                        const std::vector<double>& upper,
                        const FitOptions& options = {});

/// Scalar-model convenience wrapper: residuals are model(p, x_i) - y_i.
using ScalarModel =
    std::function<double(const std::vector<double>&, double)>;
FitReport fit(const ScalarModel& model, const std::vector<double>& x,
              const std::vector<double>& y,
              const std::vector<std::string>& names,
              const std::vector<double>& guess,
              const std::vector<double>& lower,
              const std::vector<double>& upper,
              const FitOptions& options = {});

/// One point of a drive-power calibration sweep: probe detuning against the
/// measured qubit frequency shift and induced dephasing.
struct StarkDataPoint {
    double delta_b = 0.0;   ///< rad/s
    double shift = 0.0;     ///< rad/s
    double dephasing = 0.0; ///< 1/s
};

/// Complex qubit response to a coherent buffer drive: real part is the
/// frequency shift, imaginary part the induced dephasing,
///   -4 chi |eps_d|^2 / ((kappa_b + i chi)^2 + 4 delta_b^2).
Complex ac_stark_model(double chi, double kappa_b, double eps_d, double delta_b);

/// Fits (chi, eps_d, detuning offset) to a Stark sweep at fixed kappa_b; the
/// offset absorbs the probe-axis calibration and is bounded to a small window.
FitReport stark_fit(const std::vector<StarkDataPoint>& data, double kappa_b,
                    const std::vector<double>& guess,
                    const FitOptions& options = {});

struct DriveCalibration {
    double photon_flux = 0.0;  ///< photons/s entering the input port
    double power = 0.0;        ///< W at the carrier
};

/// Input photon flux implied by a calibrated drive amplitude:
/// |eps_d|^2 / (kappa_b - kappa_b_int), times hbar*omega for power.
DriveCalibration photon_flux_from_drive(double eps_d, double kappa_b,
                                        double kappa_b_int, double omega);

/// Measured operational efficiencies against relative pump amplitude: the
/// flag-0 and flag-1 marginals and their coincidence.
struct EfficiencyCurves {
    std::vector<double> amplitude;
    std::vector<double> eta_q0;
    std::vector<double> eta_q1;
    std::vector<double> eta_and;
};

/// Everything the co-fit forward model holds fixed.
struct CofitFixed {
    double t_d = 0.0;
    double eta_cycle = 1.0;
    double f_ro0 = 1.0;
    double f_ro1 = 1.0;
    double kappa_b_ext = 0.0;
    double kappa_b_int = 0.0;
    double kappa_w_ext = 0.0;
    double kappa_w_int = 0.0;
    std::vector<double> t1_q0;  ///< measured T1 per amplitude point, s
    std::vector<double> t1_q1;
};

/// Model efficiencies at one amplitude for trial (g40, g41, kappa_m_int).
struct CofitPoint {
    double eta_q0 = 0.0;
    double eta_q1 = 0.0;
    double eta_and = 0.0;
};
CofitPoint cofit_forward_model(const CofitFixed& fixed, double amplitude,
                               double t1_q0, double t1_q1, double g40,
                               double g41, double kappa_m_int);

/// Joint fit of (g40, g41, kappa_m) to the three efficiency curves; both
/// couplings scale linearly with the relative pump amplitude.
FitReport efficiency_cofit(const EfficiencyCurves& curves,
                           const CofitFixed& fixed,
                           const std::vector<double>& guess,
                           const FitOptions& options = {});

} // namespace csmpd
