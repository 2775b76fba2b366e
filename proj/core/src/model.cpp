#include "csmpd/model.hpp"

#include <cmath>

namespace csmpd {

std::string to_string(ModeRole role) {
    switch (role) {
        case ModeRole::buffer: return "buffer";
        case ModeRole::memory: return "memory";
        case ModeRole::waste: return "waste";
        case ModeRole::readout: return "readout";
    }
    return "?";
}

ModeRole mode_role_from_string(const std::string& name) {
    if (name == "buffer") return ModeRole::buffer;
    if (name == "memory") return ModeRole::memory;
    if (name == "waste") return ModeRole::waste;
    if (name == "readout") return ModeRole::readout;
    throw ConfigError("role", "unknown mode role '" + name + "'");
}

Complex coupling_strength(const QubitSpec& qubit, const PumpSpec& pump) {
    if (qubit.chi_left == 0.0 || qubit.chi_right == 0.0)
        throw ConfigError("chi", "degenerate coupling: dispersive shift is zero");
    const double prod = qubit.chi_left * qubit.chi_right;
    if (prod < 0.0)
        throw ConfigError("chi", "mixed-sign dispersive shifts give a complex "
                                 "sqrt; not a physical stage");
    return -pump.xi * std::sqrt(prod);
}

void ChainSpec::validate() const {
    if (modes.size() != qubits.size() + 1 || modes.size() != pumps.size() + 1)
        throw ConfigError("chain", "need N+1 modes, N qubits, N pumps; got " +
                                       std::to_string(modes.size()) + "/" +
                                       std::to_string(qubits.size()) + "/" +
                                       std::to_string(pumps.size()));
    if (modes.size() < 2)
        throw ConfigError("chain", "a chain has at least a buffer and a waste");
    if (modes.front().role != ModeRole::buffer)
        throw ConfigError("mode.0.role", "chain must start with the buffer");
    if (modes.back().role != ModeRole::waste)
        throw ConfigError("mode." + std::to_string(modes.size() - 1) + ".role",
                          "chain must end with the waste");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        const std::string key = "mode." + std::to_string(i);
        if (i != 0 && m.role == ModeRole::buffer)
            throw ConfigError(key + ".role", "only mode 0 may be the buffer");
        if (i != modes.size() - 1 && m.role == ModeRole::waste)
            throw ConfigError(key + ".role", "only the last mode may be the waste");
        if (!(m.omega > 0.0))
            throw ConfigError(key + ".omega", "mode frequency must be positive");
        // kappa_total() == 0 is allowed: a closed mode is meaningful for the
        // few-excitation dynamics (preparation cavity).  Scattering requires
        // open input/output ports and checks those itself.
        if (m.kappa_ext < 0.0 || m.kappa_int < 0.0)
            throw ConfigError(key + ".kappa", "decay rates must be nonnegative");
    }
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const auto& q = qubits[i];
        const std::string key = "qubit." + std::to_string(i);
        if (!(q.p_eq_reset >= 0.0 && q.p_eq_reset <= q.p_eq && q.p_eq < 1.0))
            throw ConfigError(key + ".p_eq", "need 0 <= p_eq_reset <= p_eq < 1");
        if (!(q.f_ro > 0.0 && q.f_ro <= 1.0))
            throw ConfigError(key + ".f_ro", "readout fidelity must be in (0,1]");
        if (q.t1 < 0.0 || q.t1_pumped < 0.0)
            throw ConfigError(key + ".t1", "relaxation times must be nonnegative");
        // t1_pumped > t1 is physically odd but measured devices do whatever
        // they want; it is accepted.
    }
}

Complex ChainSpec::g4(std::size_t stage) const {
    return coupling_strength(qubits.at(stage), pumps.at(stage));
}

double ChainSpec::gamma_backward(std::size_t mode_index) const {
    if (mode_index == 0 || mode_index >= modes.size())
        throw Error("gamma_backward: mode " + std::to_string(mode_index) +
                    " has no upstream stage");
    const double g = std::abs(g4(mode_index - 1));
    return 4.0 * g * g / modes[mode_index - 1].kappa_total();
}

double ChainSpec::gamma_forward(std::size_t mode_index) const {
    if (mode_index + 1 >= modes.size())
        throw Error("gamma_forward: mode " + std::to_string(mode_index) +
                    " has no downstream stage");
    const double g = std::abs(g4(mode_index));
    return 4.0 * g * g / modes[mode_index + 1].kappa_total();
}

void CycleSpec::validate() const {
    if (!(t_d > 0.0)) throw ConfigError("cycle.t_d", "detection window must be positive");
    if (!(t_ro > 0.0)) throw ConfigError("cycle.t_ro", "readout duration must be positive");
    if (n_reset < 0.0) throw ConfigError("cycle.n_reset", "mean reset count must be >= 0");
    if (t_reset < 0.0 || (n_reset > 0.0 && t_reset == 0.0))
        throw ConfigError("cycle.t_reset", "reset duration must be positive when resets are played");
}

double eta_cycle(const CycleSpec& cycle) {
    cycle.validate();
    return cycle.t_d / cycle.t_cycle();
}

void Environment::validate() const {
    if (temperature < 0.0)
        throw ConfigError("environment.temperature", "temperature must be >= 0");
    for (const auto& [f, n] : background_occupations)
        if (!(f > 0.0) || n < 0.0)
            throw ConfigError("environment.background_occupations",
                              "need frequency > 0 and occupation >= 0");
}

} // namespace csmpd
