#include "csmpd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "csmpd/constants.hpp"
#include "csmpd/errors.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/metrics.hpp"
#include "csmpd/rng.hpp"
#include "csmpd/scattering.hpp"

namespace csmpd {

namespace {

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

/// Weighted sum of squared residuals; weights are the bootstrap
/// multiplicities (all ones for the primary fit).
double objective(const ResidualFn& residuals, const std::vector<double>& p,
                 const std::vector<double>& lower,
                 const std::vector<double>& upper,
                 const std::vector<double>& weights) {
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = clamp(p[i], lower[i], upper[i]);
    const auto r = residuals(q);
    if (!weights.empty() && weights.size() != r.size())
        throw Error("residual count changed between evaluations");
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!std::isfinite(r[i])) return std::numeric_limits<double>::infinity();
        s += w * r[i] * r[i];
    }
    return s;
}

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Nelder-Mead with standard (1, 2, 0.5, 0.5) coefficients; box bounds are
/// enforced by projecting evaluation points.
SimplexResult nelder_mead(const ResidualFn& residuals,
                          const std::vector<double>& guess,
                          const std::vector<double>& lower,
                          const std::vector<double>& upper,
                          const std::vector<double>& weights,
                          std::size_t max_iterations, double tolerance) {
    const std::size_t n = guess.size();
    const auto eval = [&](const std::vector<double>& p) {
        return objective(residuals, p, lower, upper, weights);
    };

    std::vector<std::vector<double>> simplex(n + 1, guess);
    for (std::size_t i = 0; i < n; ++i) {
        double step = 0.05 * std::abs(guess[i]);
        if (step == 0.0) step = 1e-4;
        if (std::isfinite(lower[i]) && std::isfinite(upper[i]))
            step = std::max(step, 0.02 * (upper[i] - lower[i]));
        simplex[i + 1][i] = clamp(guess[i] + step, lower[i], upper[i]);
        if (simplex[i + 1][i] == guess[i])  // ran into the bound: step down
            simplex[i + 1][i] = clamp(guess[i] - step, lower[i], upper[i]);
    }
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = eval(simplex[i]);

    SimplexResult out;
    std::vector<std::size_t> order(n + 1);
    for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        const std::size_t best = order.front(), worst = order.back();

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                diameter = std::max(diameter, std::abs(simplex[i][d] - simplex[best][d]) /
                                                  (1.0 + std::abs(simplex[best][d])));
        const double f_spread = std::abs(f[worst] - f[best]);
        if (diameter < tolerance && f_spread <= tolerance * (1.0 + std::abs(f[best]))) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        const auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + t * (centroid[d] - simplex[worst][d]);
            return p;
        };
        const auto reflected = along(1.0);
        const double fr = eval(reflected);
        if (fr < f[best]) {
            const auto expanded = along(2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                f[worst] = fe;
            } else {
                simplex[worst] = reflected;
                f[worst] = fr;
            }
        } else if (fr < f[order[n - 1]]) {
            simplex[worst] = reflected;
            f[worst] = fr;
        } else {
            const auto contracted = along(fr < f[worst] ? 0.5 : -0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, f[worst])) {
                simplex[worst] = contracted;
                f[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] =
                            simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    f[i] = eval(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (f[i] < f[best]) best = i;
    out.x.resize(n);
    for (std::size_t d = 0; d < n; ++d)
        out.x[d] = clamp(simplex[best][d], lower[d], upper[d]);
    out.f = f[best];
    return out;
}

SimplexResult fit_once(const ResidualFn& residuals, const std::vector<double>& guess,
                       const std::vector<double>& lower,
                       const std::vector<double>& upper,
                       const std::vector<double>& weights, const FitOptions& options,
                       std::uint64_t restart_key) {
    SimplexResult best = nelder_mead(residuals, guess, lower, upper, weights,
                                     options.max_iterations, options.tolerance);
    std::size_t total_iterations = best.iterations;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        CounterRng rng(options.seed ^ 0x5245535441525453ull, restart_key * 64 + r);
        std::vector<double> perturbed(guess.size());
        for (std::size_t i = 0; i < guess.size(); ++i) {
            const double scale = std::abs(best.x[i]) > 0.0 ? std::abs(best.x[i]) : 1.0;
            perturbed[i] =
                clamp(best.x[i] + 0.1 * scale * rng.gaussian(), lower[i], upper[i]);
        }
        SimplexResult trial = nelder_mead(residuals, perturbed, lower, upper, weights,
                                          options.max_iterations, options.tolerance);
        total_iterations += trial.iterations;
        if (trial.f < best.f) best = trial;
    }
    best.iterations = total_iterations;
    return best;
}

} // namespace

FitReport fit_residuals(const ResidualFn& residuals,
                        const std::vector<std::string>& names,
                        const std::vector<double>& guess,
                        const std::vector<double>& lower,
                        const std::vector<double>& upper,
                        const FitOptions& options) {
    const std::size_t n = guess.size();
    if (n == 0) throw Error("fit needs at least one parameter");
    if (names.size() != n || lower.size() != n || upper.size() != n)
        throw Error("fit: names, guess, and bounds must have equal length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i]))
            throw Error("fit: empty bound interval for " + names[i]);
        if (!std::isfinite(guess[i]) || guess[i] < lower[i] || guess[i] > upper[i])
            throw Error("fit: initial guess for " + names[i] + " is outside bounds");
    }
    const std::size_t n_residuals = residuals(guess).size();
    if (n_residuals < n)
        throw Error("fit: " + std::to_string(n_residuals) + " residuals cannot pin " +
                    std::to_string(n) + " parameters");

    const SimplexResult main = fit_once(residuals, guess, lower, upper, {}, options, 0);

    FitReport report;
    report.names = names;
    report.estimates = main.x;
    report.rss = main.f;
    report.converged = main.converged;
    report.iterations = main.iterations;

    // Bootstrap: resample residual indices (multiplicity weights), refit from
    // the point estimate, read errors off the spread of the refits.
    report.errors.assign(n, 0.0);
    if (options.bootstrap_resamples > 1) {
        std::vector<std::vector<double>> samples;
        samples.reserve(options.bootstrap_resamples);
        for (std::size_t b = 0; b < options.bootstrap_resamples; ++b) {
            CounterRng rng(options.seed ^ 0x424f4f5453545241ull, b);
            std::vector<double> weights(n_residuals, 0.0);
            for (std::size_t i = 0; i < n_residuals; ++i)
                weights[static_cast<std::size_t>(rng.uniform() *
                                                 static_cast<double>(n_residuals))] +=
                    1.0;
            FitOptions boot = options;
            boot.restarts = 0;  // refits start at the optimum; restarts add nothing
            samples.push_back(
                fit_once(residuals, main.x, lower, upper, weights, boot, b + 1).x);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double mean = 0.0;
            for (const auto& s : samples) mean += s[i];
            mean /= static_cast<double>(samples.size());
            double var = 0.0;
            for (const auto& s : samples) var += (s[i] - mean) * (s[i] - mean);
            var /= static_cast<double>(samples.size() - 1);
            report.errors[i] = std::sqrt(var);
        }
    }

    report.well_determined.assign(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::abs(report.estimates[i]);
        if (scale > 0.0 && report.errors[i] > 0.5 * scale)
            report.well_determined[i] = false;
    }
    return report;
}

FitReport fit(const ScalarModel& model, const std::vector<double>& x,
              const std::vector<double>& y, const std::vector<std::string>& names,
              const std::vector<double>& guess, const std::vector<double>& lower,
              const std::vector<double>& upper, const FitOptions& options) {
    if (x.size() != y.size()) throw Error("fit: x and y lengths differ");
    if (x.size() < guess.size())
        throw Error("fit: need at least as many points as parameters");
    const ResidualFn residuals = [&, x, y](const std::vector<double>& p) {
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = model(p, x[i]) - y[i];
        return r;
    };
    return fit_residuals(residuals, names, guess, lower, upper, options);
}

Complex ac_stark_model(double chi, double kappa_b, double eps_d, double delta_b) {
    if (!(kappa_b > 0.0)) throw Error("ac_stark_model needs kappa_b > 0");
    const Complex denom =
        (kappa_b + Complex{0.0, 1.0} * chi) * (kappa_b + Complex{0.0, 1.0} * chi) +
        4.0 * delta_b * delta_b;
    return -4.0 * chi * eps_d * eps_d / denom;
}

FitReport stark_fit(const std::vector<StarkDataPoint>& data, double kappa_b,
                    const std::vector<double>& guess, const FitOptions& options) {
    if (data.size() < 2) throw Error("stark_fit needs at least 2 sweep points");
    if (guess.size() != 3)
        throw Error("stark_fit parameters are (chi, eps_d, delta_offset)");
    const ResidualFn residuals = [data, kappa_b](const std::vector<double>& p) {
        std::vector<double> r;
        r.reserve(2 * data.size());
        for (const auto& d : data) {
            const Complex m = ac_stark_model(p[0], kappa_b, p[1], d.delta_b + p[2]);
            r.push_back(m.real() - d.shift);
            r.push_back(m.imag() - d.dephasing);
        }
        return r;
    };
    // The probe-axis offset only absorbs a small calibration error.
    const double offset_window = hz_to_angular(50e3);
    return fit_residuals(residuals, {"chi", "eps_d", "delta_offset"}, guess,
                         {-std::numeric_limits<double>::infinity(), 0.0, -offset_window},
                         {std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), offset_window},
                         options);
}

DriveCalibration photon_flux_from_drive(double eps_d, double kappa_b,
                                        double kappa_b_int, double omega) {
    if (!(kappa_b_int >= 0.0) || !(kappa_b > kappa_b_int))
        throw Error("photon_flux_from_drive needs kappa_b > kappa_b_int >= 0");
    if (!(omega > 0.0)) throw Error("photon_flux_from_drive needs omega > 0");
    DriveCalibration c;
    c.photon_flux = eps_d * eps_d / (kappa_b - kappa_b_int);
    c.power = c.photon_flux * k_hbar * omega;
    return c;
}

CofitPoint cofit_forward_model(const CofitFixed& fixed, double amplitude,
                               double t1_q0, double t1_q1, double g40, double g41,
                               double kappa_m_int) {
    const ChainSpec chain = two_stage_chain(
        fixed.kappa_b_ext, fixed.kappa_b_int, 0.0, kappa_m_int, fixed.kappa_w_ext,
        fixed.kappa_w_int, amplitude * g40, amplitude * g41);
    const FilteredTransmission t = pulse_filtered_transmissions(chain, fixed.t_d);
    const double eq0 = eta_q(fixed.t_d, t1_q0);
    const double eq1 = eta_q(fixed.t_d, t1_q1);
    CofitPoint p;
    // Flag 0 records the first conversion whether or not the photon survives
    // the memory, hence both transmission paths.
    p.eta_q0 = (t.to_waste + t.to_memory_loss) * fixed.eta_cycle * eq0 * fixed.f_ro0;
    p.eta_q1 = t.to_waste * fixed.eta_cycle * eq1 * fixed.f_ro1;
    p.eta_and = t.to_waste * fixed.eta_cycle * eq0 * eq1 * fixed.f_ro0 * fixed.f_ro1;
    return p;
}

FitReport efficiency_cofit(const EfficiencyCurves& curves, const CofitFixed& fixed,
                           const std::vector<double>& guess,
                           const FitOptions& options) {
    const std::size_t n = curves.amplitude.size();
    if (n < 5) throw Error("efficiency_cofit needs at least 5 amplitude points");
    if (curves.eta_q0.size() != n || curves.eta_q1.size() != n ||
        curves.eta_and.size() != n)
        throw Error("efficiency_cofit: curves must share the amplitude grid");
    if (fixed.t1_q0.size() != n || fixed.t1_q1.size() != n)
        throw Error("efficiency_cofit: need tabulated T1 per amplitude point");
    if (guess.size() != 3)
        throw Error("efficiency_cofit parameters are (g40, g41, kappa_m)");

    const ResidualFn residuals = [curves, fixed](const std::vector<double>& p) {
        std::vector<double> r;
        r.reserve(3 * curves.amplitude.size());
        for (std::size_t i = 0; i < curves.amplitude.size(); ++i) {
            const CofitPoint m =
                cofit_forward_model(fixed, curves.amplitude[i], fixed.t1_q0[i],
                                    fixed.t1_q1[i], p[0], p[1], p[2]);
            r.push_back(m.eta_q0 - curves.eta_q0[i]);
            r.push_back(m.eta_q1 - curves.eta_q1[i]);
            r.push_back(m.eta_and - curves.eta_and[i]);
        }
        return r;
    };
    const double g_scale =
        std::max(std::abs(guess[0]), std::abs(guess[1])) * 10.0 + 1.0;
    return fit_residuals(residuals, {"g40", "g41", "kappa_m"}, guess,
                         {-g_scale, -g_scale, 0.0},
                         {g_scale, g_scale, std::numeric_limits<double>::infinity()},
                         options);
}

} // namespace csmpd
