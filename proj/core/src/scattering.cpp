#include "csmpd/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "csmpd/constants.hpp"
#include "csmpd/errors.hpp"

namespace csmpd {

namespace {

constexpr Complex k_i{0.0, 1.0};

struct Tridiagonal {
    std::vector<Complex> diag, lower, upper;  // lower[k] couples row k to k-1
};

/// Diagonal: -i(Delta_rk - delta) - kappa_k/2 with the cumulative pump
/// detuning Delta_r0 = 0, Delta_r,k+1 = Delta_rk - delta_p,k. Off-diagonals
/// carry the stage couplings.
Tridiagonal build_system(const ChainSpec& chain, double delta) {
    const std::size_t n = chain.modes.size();
    Tridiagonal t;
    t.diag.resize(n);
    t.lower.resize(n);
    t.upper.resize(n);
    double delta_r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        t.diag[k] = -k_i * (delta_r - delta) - chain.modes[k].kappa_total() / 2.0;
        if (k + 1 < n) {
            const Complex g = chain.g4(k);
            t.upper[k] = -k_i * std::conj(g);
            t.lower[k + 1] = -k_i * g;
            delta_r -= chain.pumps[k].delta_p;
        }
    }
    return t;
}

std::vector<Complex> thomas_solve(const Tridiagonal& t, std::vector<Complex> rhs) {
    const std::size_t n = t.diag.size();
    std::vector<Complex> c(n);
    Complex pivot = t.diag[0];
    for (std::size_t k = 0;; ++k) {
        if (std::abs(pivot) < 1e-300)
            throw NumericalError("ill-conditioned chain: singular pivot at mode " +
                                 std::to_string(k));
        c[k] = t.upper[k] / pivot;
        rhs[k] /= pivot;
        if (k + 1 == n) break;
        pivot = t.diag[k + 1] - t.lower[k + 1] * c[k];
        rhs[k + 1] -= t.lower[k + 1] * rhs[k];
    }
    for (std::size_t k = n - 1; k-- > 0;) rhs[k] -= c[k] * rhs[k + 1];
    return rhs;
}

double transmission(const ChainSpec& chain, double delta) {
    return std::norm(s21(chain, delta));
}

void require_matched(const ChainSpec& chain, const char* who) {
    for (const auto& pump : chain.pumps)
        if (pump.delta_p != 0.0)
            throw Error(std::string(who) + " requires a frequency-matched chain "
                                           "(all delta_p = 0)");
}

/// Golden-section maximization of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498948482;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Bisects f(x) = level between x_in (f >= level) and x_out (f < level).
template <class F>
double bisect_crossing(F&& f, double x_in, double x_out, double level, double tol) {
    for (int it = 0; it < 200 && std::abs(x_out - x_in) > tol; ++it) {
        const double mid = 0.5 * (x_in + x_out);
        if (f(mid) >= level)
            x_in = mid;
        else
            x_out = mid;
    }
    return 0.5 * (x_in + x_out);
}

double numeric_fwhm(const ChainSpec& chain) {
    const double kappa_scale =
        chain.modes.front().kappa_total() + chain.modes.back().kappa_total();
    const double span = 5.0 * kappa_scale;
    constexpr std::size_t n_scan = 2001;

    std::vector<double> x(n_scan), y(n_scan);
    for (std::size_t i = 0; i < n_scan; ++i) {
        x[i] = -span + 2.0 * span * static_cast<double>(i) / (n_scan - 1);
        y[i] = transmission(chain, x[i]);
    }
    const std::size_t imax =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    if (!(y[imax] > 0.0)) throw NumericalError("flat response: no bandwidth defined");
    if (imax == 0 || imax + 1 == n_scan)
        throw NumericalError("response peak at the edge of the scan window");

    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < n_scan; ++i)
        if (y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > 0.5 * y[imax])
            peaks.push_back(x[i]);
    if (peaks.size() > 1) throw MultiPeakError(peaks);

    const auto f = [&](double d) { return transmission(chain, d); };
    const double x_peak = golden_max(f, x[imax - 1], x[imax + 1], 1e-13 * kappa_scale);
    const double half = 0.5 * std::max(f(x_peak), y[imax]);

    // March outward on the precomputed grid to bracket each crossing.
    const double tol = 1e-9 * kappa_scale;
    std::size_t ir = imax;
    while (ir + 1 < n_scan && y[ir + 1] >= half) ++ir;
    if (ir + 1 == n_scan) throw NumericalError("right half-maximum outside scan window");
    std::size_t il = imax;
    while (il > 0 && y[il - 1] >= half) --il;
    if (il == 0) throw NumericalError("left half-maximum outside scan window");
    const double right =
        bisect_crossing(f, std::max(x_peak, x[ir]), x[ir + 1], half, tol);
    const double left =
        bisect_crossing(f, std::min(x_peak, x[il]), x[il - 1], half, tol);
    return right - left;
}

/// Exact FWHM of the two-mode response: |S21|^2 = const / |D(delta)|^2 with
/// |D|^2 = delta^4 + b delta^2 + A^2, so the half-maximum condition is a
/// quadratic in delta^2.
double analytic_fwhm_n1(const ChainSpec& chain) {
    if (chain.n_stages() != 1)
        throw Error("analytic_n1 bandwidth is defined for N=1 chains only");
    require_matched(chain, "analytic_n1 bandwidth");
    const double kb = chain.modes[0].kappa_total();
    const double kw = chain.modes[1].kappa_total();
    const double g2 = std::norm(chain.g4(0));
    const double a = kb * kw / 4.0 + g2;
    const double b = (kb + kw) * (kb + kw) / 4.0 - 2.0 * a;
    return std::sqrt(2.0 * (std::hypot(b, 2.0 * a) - b));
}

double interior_kappa_sum(const ChainSpec& chain) {
    if (chain.n_stages() != 2)
        throw Error("approx_sum bandwidth is defined for N=2 chains only");
    return chain.modes[1].kappa_total() + chain.gamma_mb() + chain.gamma_mw();
}

/// Trapezoidal quadrature of ampl(delta) * envelope_transform(delta).
double filtered_norm(const std::vector<double>& grid,
                     const std::vector<Complex>& ampl, double t_d) {
    if (grid.size() < 3) throw Error("pulse filter needs at least 3 grid points");
    double max_spacing = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i + 1] > grid[i]))
            throw Error("pulse filter needs a strictly increasing detuning grid");
        max_spacing = std::max(max_spacing, grid[i + 1] - grid[i]);
    }
    const double required = k_two_pi / (10.0 * t_d);
    if (max_spacing > required)
        throw GridError(required,
                        "detuning grid too coarse for t_d: spacing " +
                            std::to_string(max_spacing) + " rad/s, need <= " +
                            std::to_string(required) + " rad/s");

    const auto sinc = [](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; };
    const auto weight = [&](double d) {
        return t_d / k_two_pi * sinc(0.5 * d * t_d);
    };
    Complex acc{0.0, 0.0};
    Complex prev = ampl[0] * weight(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const Complex cur = ampl[i] * weight(grid[i]);
        acc += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
        prev = cur;
    }
    return std::norm(acc);
}

} // namespace

SolveResult solve_single_excitation(const ChainSpec& chain, double delta) {
    chain.validate();
    if (!(chain.modes.front().kappa_ext > 0.0))
        throw ConfigError("mode.0.kappa_ext", "scattering needs an open input port");
    if (!(chain.modes.back().kappa_ext > 0.0))
        throw ConfigError("mode." + std::to_string(chain.modes.size() - 1) +
                              ".kappa_ext",
                          "scattering needs an open output port");
    const Tridiagonal t = build_system(chain, delta);
    std::vector<Complex> rhs(chain.modes.size());
    rhs[0] = -std::sqrt(chain.modes.front().kappa_ext);
    SolveResult r;
    r.psi = thomas_solve(t, std::move(rhs));
    r.s21 = std::sqrt(chain.modes.back().kappa_ext) * r.psi.back();
    return r;
}

Complex s21(const ChainSpec& chain, double delta) {
    return solve_single_excitation(chain, delta).s21;
}

Complex s_loss(const ChainSpec& chain, double delta, std::size_t mode_index) {
    if (mode_index == 0 || mode_index + 1 >= chain.modes.size())
        throw Error("s_loss: mode " + std::to_string(mode_index) +
                    " is not an interior mode");
    const auto r = solve_single_excitation(chain, delta);
    return std::sqrt(chain.modes[mode_index].kappa_total()) * r.psi[mode_index];
}

double cooperativity(const ChainSpec& chain, bool lossless_memories) {
    chain.validate();
    const std::size_t n = chain.n_stages();
    if (n == 0) throw Error("cooperativity needs at least one conversion stage");
    double gamma = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double g2 = std::norm(chain.g4(k));
        if (k + 1 == n) {
            gamma = 4.0 * g2 / chain.modes[k + 1].kappa_total();
            continue;
        }
        if (gamma == 0.0)
            throw NumericalError("cooperativity recursion: stage " +
                                 std::to_string(k + 1) + " has zero coupling");
        const double downstream =
            lossless_memories ? gamma : chain.modes[k + 1].kappa_total() + gamma;
        gamma = 4.0 * g2 / downstream;
    }
    return gamma / chain.modes[0].kappa_total();
}

double eta_4wm(double c) {
    if (c < 0.0) throw Error("cooperativity must be >= 0");
    const double onec = 1.0 + c;
    return 4.0 * c / (onec * onec);
}

double memory_efficiency(double gamma_mb, double gamma_mw, double kappa_m) {
    if (gamma_mb < 0.0 || gamma_mw < 0.0 || kappa_m < 0.0)
        throw Error("memory_efficiency rates must be >= 0");
    const double gsum = gamma_mb + gamma_mw;
    if (!(gsum > 0.0)) throw Error("memory_efficiency needs gamma_mb + gamma_mw > 0");
    const double frac = gsum / (kappa_m + gsum);
    return frac * frac;
}

double bandwidth(const ChainSpec& chain, BandwidthMethod method) {
    chain.validate();
    switch (method) {
        case BandwidthMethod::analytic_n1: return analytic_fwhm_n1(chain);
        case BandwidthMethod::approx_sum: return interior_kappa_sum(chain);
        case BandwidthMethod::numeric_fwhm: return numeric_fwhm(chain);
    }
    throw Error("unknown bandwidth method");
}

ScatteringResult compute_scattering(const ChainSpec& chain, double delta_min,
                                    double delta_max, std::size_t n_points) {
    BandwidthMethod method = BandwidthMethod::numeric_fwhm;
    if (chain.n_stages() == 1) method = BandwidthMethod::analytic_n1;
    if (chain.n_stages() == 2) method = BandwidthMethod::approx_sum;
    return compute_scattering(chain, delta_min, delta_max, n_points, method);
}

ScatteringResult compute_scattering(const ChainSpec& chain, double delta_min,
                                    double delta_max, std::size_t n_points,
                                    BandwidthMethod method) {
    chain.validate();
    if (!(delta_max > delta_min)) throw Error("need delta_max > delta_min");
    if (n_points < 2) throw Error("need at least 2 grid points");

    ScatteringResult result;
    result.delta_grid.resize(n_points);
    result.s21.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double d = delta_min + (delta_max - delta_min) *
                                         static_cast<double>(i) /
                                         static_cast<double>(n_points - 1);
        result.delta_grid[i] = d;
        result.s21[i] = s21(chain, d);
        if (std::norm(result.s21[i]) > 1.0 + 1e-12)
            throw NumericalError("passivity violated at delta = " + std::to_string(d));
    }
    result.peak_transmission = std::norm(s21(chain, 0.0));
    result.cooperativity = cooperativity(chain);
    result.eta_4wm = eta_4wm(result.cooperativity);
    result.eta_m = 1.0;
    for (std::size_t j = 1; j + 1 < chain.modes.size(); ++j)
        result.eta_m *= memory_efficiency(chain.gamma_backward(j),
                                          chain.gamma_forward(j),
                                          chain.modes[j].kappa_total());
    result.kappa_d = bandwidth(chain, method);
    return result;
}

double pulse_filtered_efficiency(const ScatteringResult& scattering, double t_d,
                                 PulseEnvelope envelope) {
    if (envelope != PulseEnvelope::rectangular)
        throw Error("only the rectangular envelope is implemented");
    if (!(t_d > 0.0)) throw Error("t_d must be positive");
    return filtered_norm(scattering.delta_grid, scattering.s21, t_d);
}

FilteredTransmission pulse_filtered_transmissions(const ChainSpec& chain, double t_d) {
    chain.validate();
    if (chain.n_stages() != 2)
        throw Error("pulse_filtered_transmissions is defined for N=2 chains only");
    require_matched(chain, "pulse_filtered_transmissions");
    if (!(t_d > 0.0)) throw Error("t_d must be positive");

    const double a0 = -chain.modes[0].kappa_total() / 2.0;
    const double a1 = -chain.modes[1].kappa_total() / 2.0;
    const double a2 = -chain.modes[2].kappa_total() / 2.0;
    const double g0sq = std::norm(chain.g4(0));
    const double g1sq = std::norm(chain.g4(1));

    // Response denominator as a cubic in the probe detuning:
    // D(delta) = c3 d^3 + c2 d^2 + c1 d + c0.
    const Complex c3 = -k_i;
    const Complex c2 = -(a0 + a1 + a2);
    const Complex c1 = k_i * (a0 * a1 + a0 * a2 + a1 * a2 + g0sq + g1sq);
    const Complex c0 = a0 * a1 * a2 + a0 * g1sq + a2 * g0sq;
    const auto d_of = [&](Complex d) { return ((c3 * d + c2) * d + c1) * d + c0; };
    const auto dprime = [&](Complex d) { return (3.0 * c3 * d + 2.0 * c2) * d + c1; };

    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(0, 2) = -c0 / c3;
    companion(1, 2) = -c1 / c3;
    companion(2, 2) = -c2 / c3;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, false);
    std::array<Complex, 3> poles;
    for (int j = 0; j < 3; ++j) poles[j] = es.eigenvalues()(j);

    double min_gap = std::abs(poles[0] - poles[1]);
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        scale = std::max(scale, std::abs(poles[j]));
        min_gap = std::min(min_gap, std::abs(poles[j] - poles[(j + 1) % 3]));
    }
    if (min_gap < 1e-6 * scale) {
        // (Near-)degenerate poles: residues are unusable; integrate on a
        // grid instead. Slow but only reachable at contrived parameters.
        const double span = 5.0 * (chain.modes[0].kappa_total() +
                                   chain.modes[2].kappa_total()) +
                            20.0 * k_two_pi / t_d;
        const double spacing = k_two_pi / (40.0 * t_d);
        const std::size_t n = std::min<std::size_t>(
            400001, static_cast<std::size_t>(2.0 * span / spacing) + 2);
        std::vector<double> grid(n);
        std::vector<Complex> aw(n), am(n);
        for (std::size_t i = 0; i < n; ++i) {
            grid[i] = -span + 2.0 * span * static_cast<double>(i) / (n - 1);
            const auto r = solve_single_excitation(chain, grid[i]);
            aw[i] = r.s21;
            am[i] = std::sqrt(chain.modes[1].kappa_total()) * r.psi[1];
        }
        return {filtered_norm(grid, aw, t_d), filtered_norm(grid, am, t_d)};
    }

    // Numerators from the exact solver: constant for the waste path, linear
    // in delta for the memory-loss path (Cramer structure).
    const Complex nw = s21(chain, 0.0) * c0;
    const double probe = chain.modes[2].kappa_total();
    const Complex sm0 = s_loss(chain, 0.0);
    const Complex smp = s_loss(chain, probe);
    const Complex nm0 = sm0 * c0;
    const Complex nm_slope = (smp * d_of(probe) - nm0) / probe;

    // Filtered amplitude of a pole expansion sum r_j/(delta - delta_j) under
    // the centered rectangular window: F = sum_j -r_j (1 - e^{-i delta_j
    // t_d/2}) / delta_j. All poles sit in the lower half plane.
    const auto filtered = [&](const auto& numerator) {
        Complex f{0.0, 0.0};
        for (const Complex& p : poles) {
            const Complex r = numerator(p) / dprime(p);
            f += -r * (1.0 - std::exp(-k_i * p * (t_d / 2.0))) / p;
        }
        return std::norm(f);
    };
    FilteredTransmission out;
    out.to_waste = filtered([&](Complex) { return nw; });
    out.to_memory_loss = filtered([&](Complex d) { return nm0 + nm_slope * d; });
    return out;
}

PumpResonanceLines pump_resonance_lines(const ChainSpec& chain) {
    chain.validate();
    if (chain.n_stages() != 2)
        throw Error("pump_resonance_lines is defined for N=2 chains only");
    PumpResonanceLines lines;
    lines.first_stage = {0.0, 0.0};
    lines.cascade = {-1.0, 0.0};
    // A mode holding the converted photon is dressed by the cross-Kerr of the
    // qubit flagging that conversion (the stage's right-neighbour shift); the
    // buffer is bare. The pump supplies the dressed energy difference minus
    // its own AC-Stark shift of the qubit.
    const auto dressed = [&](std::size_t mode) {
        return chain.modes[mode].omega -
               (mode > 0 ? chain.qubits[mode - 1].chi_right : 0.0);
    };
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& q = chain.qubits[k];
        const double stark = 2.0 * std::norm(chain.pumps[k].xi) * q.chi_self;
        const double omega_p = q.omega_ge + dressed(k + 1) - dressed(k) - stark +
                               chain.pumps[k].delta_p;
        (k == 0 ? lines.omega_p0 : lines.omega_p1) = omega_p;
    }
    return lines;
}

} // namespace csmpd
