#include "csmpd/dynamics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "csmpd/errors.hpp"

namespace csmpd {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr Complex k_i{0.0, 1.0};

/// Subsystem order (buffer, qubit0, memory, qubit1, ..., waste); subsystem s
/// owns bit (count-1-s) of the basis index, so subsystem 0 is the MSB.
std::size_t subsystem_count(std::size_t n_stages) { return 2 * n_stages + 1; }

std::size_t mode_subsystem(std::size_t mode) { return 2 * mode; }
std::size_t qubit_subsystem(std::size_t qubit) { return 2 * qubit + 1; }

MatrixXcd lowering(std::size_t subsystem, std::size_t count) {
    const std::size_t dim = std::size_t{1} << count;
    const std::size_t bit = std::size_t{1} << (count - 1 - subsystem);
    MatrixXcd op = MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        if (i & bit) op(i & ~bit, i) = 1.0;
    return op;
}

double max_rate(const ChainSpec& chain) {
    double rate = 0.0;
    for (const auto& m : chain.modes) rate = std::max(rate, m.kappa_total());
    for (std::size_t k = 0; k < chain.n_stages(); ++k)
        rate = std::max(rate, std::abs(chain.g4(k)));
    double delta_r = 0.0;
    for (const auto& p : chain.pumps) {
        delta_r -= p.delta_p;
        rate = std::max(rate, std::abs(delta_r));
    }
    return rate;
}

void check_grid(const ChainSpec& chain, double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw Error("need t_max > 0 and dt > 0");
    const double rate = max_rate(chain);
    const double required = 0.05 / rate;
    if (dt > required)
        throw NumericalError("dt too coarse for the fastest rate; need dt <= " +
                             std::to_string(required) + " s");
}

/// Cumulative pump detuning per mode (the rotating-frame offsets), shifted
/// by the probe detuning when driving.
std::vector<double> frame_detunings(const ChainSpec& chain, double probe) {
    std::vector<double> det(chain.modes.size());
    double delta_r = 0.0;
    for (std::size_t k = 0; k < chain.modes.size(); ++k) {
        det[k] = delta_r - probe;
        if (k < chain.pumps.size()) delta_r -= chain.pumps[k].delta_p;
    }
    return det;
}

/// Embedded 4(5) step: one full RK4 step against two half steps, Richardson
/// error estimate. Accuracy over speed — the state is at most 32x32.
template <class State, class Rhs>
void integrate_adaptive(State& y, double t0, double t1, double abs_tol, Rhs&& rhs) {
    const auto rk4 = [&rhs](const State& y0, double t, double h) {
        State k1 = rhs(t, y0);
        State k2 = rhs(t + 0.5 * h, y0 + 0.5 * h * k1);
        State k3 = rhs(t + 0.5 * h, y0 + 0.5 * h * k2);
        State k4 = rhs(t + h, y0 + h * k3);
        return State(y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
    double t = t0;
    double h = (t1 - t0) / 8.0;
    const double h_min = (t1 - t0) * 1e-14;
    while (t < t1) {
        h = std::min(h, t1 - t);
        const State full = rk4(y, t, h);
        State half = rk4(y, t, 0.5 * h);
        half = rk4(half, t + 0.5 * h, 0.5 * h);
        const double err = (full - half).cwiseAbs().maxCoeff() / 15.0;
        if (err <= abs_tol || h <= h_min) {
            // Local extrapolation: the two-half-step result is 5th order.
            y = half + (half - full) / 15.0;
            t += h;
        }
        const double scale =
            err > 0.0 ? 0.9 * std::pow(abs_tol / err, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, scale));
        if (h < h_min && t < t1)
            throw NumericalError("integrator step-size underflow at t = " +
                                 std::to_string(t));
    }
}

} // namespace

SubspaceState vacuum_state(std::size_t n_stages) {
    SubspaceState s;
    s.amplitudes.assign(std::size_t{1} << subsystem_count(n_stages), {0.0, 0.0});
    s.amplitudes[0] = 1.0;
    return s;
}

SubspaceState photon_in_buffer(std::size_t n_stages) {
    SubspaceState s = vacuum_state(n_stages);
    s.amplitudes[0] = 0.0;
    const std::size_t count = subsystem_count(n_stages);
    s.amplitudes[std::size_t{1} << (count - 1)] = 1.0;  // buffer bit is the MSB
    return s;
}

EvolutionTrace evolve_master_equation(const ChainSpec& chain,
                                      const SubspaceState& initial, double t_max,
                                      double dt, double abs_tol) {
    chain.validate();
    const std::size_t n = chain.n_stages();
    if (n == 0 || n > 2)
        throw Error("master-equation model supports 1 or 2 stages (dimension <= 32)");
    if (chain.modes.front().kappa_total() > 0.0)
        throw Error("master-equation model treats the buffer as a closed "
                    "preparation cavity; set its kappa to zero (the open-port "
                    "physics lives in evolve_linear_model)");
    check_grid(chain, t_max, dt);

    const std::size_t count = subsystem_count(n);
    const std::size_t dim = std::size_t{1} << count;
    if (initial.amplitudes.size() != dim)
        throw Error("initial state has dimension " +
                    std::to_string(initial.amplitudes.size()) + ", chain needs " +
                    std::to_string(dim));

    // Stage couplings: photon hops down the chain, raising the stage flag.
    MatrixXcd h_full = MatrixXcd::Zero(dim, dim);
    for (std::size_t k = 0; k < n; ++k) {
        const MatrixXcd hop = lowering(mode_subsystem(k), count) *
                              lowering(qubit_subsystem(k), count).adjoint() *
                              lowering(mode_subsystem(k + 1), count).adjoint();
        h_full += chain.g4(k) * hop + std::conj(chain.g4(k)) * hop.adjoint();
    }
    const auto detunings = frame_detunings(chain, 0.0);
    for (std::size_t k = 0; k < chain.modes.size(); ++k) {
        if (detunings[k] == 0.0) continue;
        const MatrixXcd low = lowering(mode_subsystem(k), count);
        h_full += detunings[k] * (low.adjoint() * low);
    }

    std::vector<MatrixXcd> collapse_full;
    for (std::size_t k = 1; k < chain.modes.size(); ++k) {
        const double kappa = chain.modes[k].kappa_total();
        if (kappa > 0.0)
            collapse_full.push_back(std::sqrt(kappa) *
                                    lowering(mode_subsystem(k), count));
    }

    // The evolution never leaves the block reachable from the initial support
    // through the Hamiltonian and the jumps; project everything onto it.
    std::vector<char> reachable(dim, 0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < dim; ++i)
        if (std::norm(initial.amplitudes[i]) > 0.0) {
            reachable[i] = 1;
            frontier.push_back(i);
        }
    if (frontier.empty()) throw Error("initial state has zero norm");
    while (!frontier.empty()) {
        const std::size_t i = frontier.back();
        frontier.pop_back();
        for (std::size_t j = 0; j < dim; ++j) {
            if (reachable[j]) continue;
            bool coupled = h_full(j, i) != 0.0;
            for (const auto& c : collapse_full)
                coupled = coupled || c(j, i) != 0.0;
            if (coupled) {
                reachable[j] = 1;
                frontier.push_back(j);
            }
        }
    }
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < dim; ++i)
        if (reachable[i]) support.push_back(i);
    const auto d = static_cast<Eigen::Index>(support.size());

    const auto project = [&](const MatrixXcd& m) {
        MatrixXcd p(d, d);
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index b = 0; b < d; ++b)
                p(a, b) = m(support[static_cast<std::size_t>(a)],
                            support[static_cast<std::size_t>(b)]);
        return p;
    };
    const MatrixXcd h = project(h_full);
    std::vector<MatrixXcd> collapse;
    collapse.reserve(collapse_full.size());
    for (const auto& c : collapse_full) collapse.push_back(project(c));

    VectorXcd psi(d);
    for (Eigen::Index a = 0; a < d; ++a)
        psi(a) = initial.amplitudes[support[static_cast<std::size_t>(a)]];
    MatrixXcd rho = psi * psi.adjoint();
    rho /= rho.trace().real();

    std::vector<MatrixXcd> collapse_sq;
    collapse_sq.reserve(collapse.size());
    for (const auto& c : collapse) collapse_sq.push_back(c.adjoint() * c);
    const auto rhs = [&](double, const MatrixXcd& r) -> MatrixXcd {
        MatrixXcd drho = -k_i * (h * r - r * h);
        for (std::size_t j = 0; j < collapse.size(); ++j)
            drho += collapse[j] * r * collapse[j].adjoint() -
                    0.5 * (collapse_sq[j] * r + r * collapse_sq[j]);
        return drho;
    };

    // Occupancies are diagonal in this basis: read them off the bits.
    const auto occupancy = [&](std::size_t subsystem) {
        const std::size_t bit = std::size_t{1} << (count - 1 - subsystem);
        double p = 0.0;
        for (Eigen::Index a = 0; a < d; ++a)
            if (support[static_cast<std::size_t>(a)] & bit)
                p += rho(a, a).real();
        return p;
    };

    EvolutionTrace trace;
    trace.mode_occupation.resize(chain.modes.size());
    trace.qubit_occupation.resize(n);
    const auto sample = [&](double t) {
        trace.t.push_back(t);
        for (std::size_t k = 0; k < chain.modes.size(); ++k)
            trace.mode_occupation[k].push_back(occupancy(mode_subsystem(k)));
        for (std::size_t k = 0; k < n; ++k)
            trace.qubit_occupation[k].push_back(occupancy(qubit_subsystem(k)));
        trace.total_probability.push_back(rho.trace().real());
    };

    sample(0.0);
    const std::size_t n_samples = static_cast<std::size_t>(std::ceil(t_max / dt));
    for (std::size_t j = 1; j <= n_samples; ++j) {
        const double t_next = std::min(t_max, static_cast<double>(j) * dt);
        integrate_adaptive(rho, trace.t.back(), t_next, abs_tol, rhs);
        sample(t_next);
    }
    return trace;
}

AmplitudeTrace evolve_linear_model(const ChainSpec& chain,
                                   const std::vector<Complex>& initial,
                                   double t_max, double dt,
                                   const LinearDrive& drive, double abs_tol) {
    chain.validate();
    const std::size_t n_modes = chain.modes.size();
    if (initial.size() != n_modes)
        throw Error("initial amplitudes: got " + std::to_string(initial.size()) +
                    ", chain has " + std::to_string(n_modes) + " modes");
    check_grid(chain, t_max, dt);

    const auto detunings = frame_detunings(chain, drive.detuning);
    MatrixXcd m = MatrixXcd::Zero(n_modes, n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        m(k, k) = -k_i * detunings[k] - chain.modes[k].kappa_total() / 2.0;
        if (k + 1 < n_modes) {
            const Complex g = chain.g4(k);
            m(k, k + 1) = -k_i * std::conj(g);
            m(k + 1, k) = -k_i * g;
        }
    }
    VectorXcd d = VectorXcd::Zero(n_modes);
    d(0) = -std::sqrt(chain.modes.front().kappa_ext) * drive.amplitude;

    VectorXcd y(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) y(k) = initial[k];
    const auto rhs = [&](double, const VectorXcd& v) -> VectorXcd {
        return m * v + d;
    };

    AmplitudeTrace trace;
    trace.amplitudes.resize(n_modes);
    const auto sample = [&](double t) {
        trace.t.push_back(t);
        for (std::size_t k = 0; k < n_modes; ++k)
            trace.amplitudes[k].push_back(y(k));
    };
    sample(0.0);
    const std::size_t n_samples = static_cast<std::size_t>(std::ceil(t_max / dt));
    for (std::size_t j = 1; j <= n_samples; ++j) {
        const double t_next = std::min(t_max, static_cast<double>(j) * dt);
        integrate_adaptive(y, trace.t.back(), t_next, abs_tol, rhs);
        sample(t_next);
    }
    return trace;
}

} // namespace csmpd
