#include "csmpd/metrics.hpp"

#include <cmath>

#include "csmpd/constants.hpp"

namespace csmpd {

double thermal_occupation(double temperature, double frequency_hz) {
    if (temperature < 0.0) throw Error("temperature must be >= 0");
    if (!(frequency_hz > 0.0)) throw Error("frequency must be positive");
    if (temperature == 0.0) return 0.0;
    const double x = k_planck * frequency_hz / (k_boltzmann * temperature);
    const double denom = std::expm1(x);
    return std::isinf(denom) ? 0.0 : 1.0 / denom;
}

double mean_occupation(const Environment& env, double frequency_hz) {
    if (auto it = env.background_occupations.find(frequency_hz);
        it != env.background_occupations.end())
        return it->second;
    return thermal_occupation(env.temperature, frequency_hz);
}

double alpha_q(const QubitSpec& qubit, const CycleSpec& cycle) {
    cycle.validate();
    if (qubit.p_eq == 0.0 && qubit.p_eq_reset == 0.0) return 0.0;
    if (!(qubit.t1 > 0.0)) throw Error("alpha_q needs t1 > 0");
    return (qubit.p_eq - qubit.p_eq_reset) / qubit.t1 * eta_cycle(cycle) +
           qubit.p_eq_reset / cycle.t_cycle();
}

double alpha_q_exact(const QubitSpec& qubit, const CycleSpec& cycle) {
    cycle.validate();
    if (qubit.p_eq == 0.0 && qubit.p_eq_reset == 0.0) return 0.0;
    if (!(qubit.t1 > 0.0)) throw Error("alpha_q needs t1 > 0");
    const double decay = std::exp(-cycle.t_d / qubit.t1);
    const double p_at_readout = qubit.p_eq - (qubit.p_eq - qubit.p_eq_reset) * decay;
    return p_at_readout / cycle.t_cycle();
}

double alpha_th(double eta, double kappa_d, double n_bar) {
    if (eta < 0.0 || kappa_d < 0.0 || n_bar < 0.0)
        throw Error("alpha_th inputs must be >= 0");
    return eta * kappa_d / 4.0 * n_bar;
}

NoiseBudget noise_budget(const std::vector<QubitSpec>& qubits, const CycleSpec& cycle,
                         double eta, double kappa_d, const Environment& env,
                         double buffer_frequency_hz, double alpha_pump,
                         double alpha_ro) {
    if (alpha_pump < 0.0 || alpha_ro < 0.0)
        throw Error("alpha_pump and alpha_ro must be >= 0");
    NoiseBudget budget;
    budget.alpha_pump = alpha_pump;
    budget.alpha_ro = alpha_ro;
    budget.alpha_th = alpha_th(eta, kappa_d, mean_occupation(env, buffer_frequency_hz));
    if (qubits.size() == 1) {
        budget.alpha_q = alpha_q(qubits[0], cycle);
    } else if (!qubits.empty()) {
        // A cascaded count needs every flag up within one cycle; intrinsic
        // flips are independent, so the joint rate is the product of the
        // per-cycle probabilities over one cycle.
        double prob = 1.0;
        for (const auto& q : qubits) prob *= alpha_q(q, cycle) * cycle.t_cycle();
        budget.alpha_q = prob / cycle.t_cycle();
    }
    budget.alpha_total =
        budget.alpha_q + budget.alpha_pump + budget.alpha_ro + budget.alpha_th;
    return budget;
}

double eta_q(double t_d, double t1) {
    if (!(t_d > 0.0) || !(t1 > 0.0)) throw Error("eta_q needs t_d > 0 and t1 > 0");
    const double x = t_d / t1;
    return -std::expm1(-x) / x;
}

double optimal_window_fraction(double dead_time_ratio) {
    if (dead_time_ratio < 0.0) throw Error("dead-time ratio must be >= 0");
    if (dead_time_ratio == 0.0) return 0.0;
    const auto f = [&](double x) { return std::expm1(x) - x - dead_time_ratio; };
    double lo = 0.0, hi = 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

EfficiencyBudget efficiency_budget(const ChainSpec& chain, const CycleSpec& cycle,
                                   const ScatteringResult& scattering,
                                   const std::vector<double>& t1s,
                                   const std::vector<double>& f_ros) {
    chain.validate();
    EfficiencyBudget budget;
    budget.eta_4wm = scattering.eta_4wm;
    budget.eta_m = scattering.eta_m;
    budget.eta_cycle = csmpd::eta_cycle(cycle);
    budget.eta_total = budget.eta_4wm * budget.eta_m * budget.eta_cycle;
    for (std::size_t k = 0; k < chain.qubits.size(); ++k) {
        const double t1 = k < t1s.size() ? t1s[k] : chain.qubits[k].t1;
        const double f_ro = k < f_ros.size() ? f_ros[k] : chain.qubits[k].f_ro;
        budget.eta_q.push_back(eta_q(cycle.t_d, t1));
        budget.f_ro.push_back(f_ro);
        budget.eta_total *= budget.eta_q.back() * f_ro;
    }
    return budget;
}

double sensitivity(double alpha, double eta, double frequency_hz) {
    if (!(eta > 0.0)) throw Error("sensitivity undefined for eta = 0");
    if (alpha < 0.0) throw Error("alpha must be >= 0");
    return k_hbar * hz_to_angular(frequency_hz) * std::sqrt(alpha) / eta;
}

double nep(double alpha, double eta, double frequency_hz, double t) {
    if (!(eta > 0.0)) throw Error("nep undefined for eta = 0");
    if (!(t > 0.0)) throw Error("integration time must be positive");
    if (alpha < 0.0) throw Error("alpha must be >= 0");
    return k_hbar * hz_to_angular(frequency_hz) *
           (1.0 + std::sqrt(1.0 + 4.0 * alpha * t)) / (2.0 * eta * std::sqrt(t));
}

double snr(double power_w, double eta, double alpha, double t, double frequency_hz) {
    if (power_w < 0.0 || alpha < 0.0) throw Error("snr inputs must be >= 0");
    if (!(t > 0.0)) throw Error("integration time must be positive");
    const double signal = eta * power_w * t / (k_hbar * hz_to_angular(frequency_hz));
    const double noise_sq = signal + alpha * t;
    return noise_sq > 0.0 ? signal / std::sqrt(noise_sq) : 0.0;
}

SensitivityReport sensitivity_report(double alpha, double alpha_err, double eta,
                                     double frequency_hz, double t) {
    SensitivityReport report;
    report.s_operational = sensitivity(alpha, eta, frequency_hz);
    report.s_intrinsic = sensitivity(alpha_err, eta, frequency_hz);
    report.nep_at_t = nep(alpha, eta, frequency_hz, t);
    return report;
}

double temperature_model(double coeff_k, double coeff_c, double temperature,
                         const std::vector<double>& frequencies_hz) {
    if (coeff_k < 0.0 || coeff_c < 0.0) throw Error("model coefficients must be >= 0");
    if (frequencies_hz.empty()) throw Error("temperature model needs a frequency");
    double occ = 1.0;
    for (double f : frequencies_hz) occ *= thermal_occupation(temperature, f);
    return coeff_k * occ + coeff_c;
}

} // namespace csmpd
