#include "csmpd/fixtures.hpp"

#include "csmpd/errors.hpp"

namespace csmpd {

namespace {

/// Fitted parameters of the demonstrated two-stage device. Kept as config
/// text so the compiled-in fixture and the shipped .cfg file cannot drift.
constexpr const char* k_reference_cfg = R"cfg(# Two-stage reference device, fitted hardware parameters.
# Frequencies in Hz, decay rates in 1/s, times in s.

[mode.0]
role = buffer
omega = 8.798e9
kappa_ext = 5.8e6
kappa_int = 0

[mode.1]
role = memory
omega = 8.095056e9
kappa_ext = 0
kappa_int = 3.7e5

[mode.2]
role = waste
omega = 7.462e9
kappa_ext = 3.36e6
kappa_int = 0

[qubit.0]
omega_ge = 6.614e9
chi_self = -1.2e8
chi_left = -1.784e6
chi_right = -2e6
t1 = 30e-6
t1_pumped = 30e-6
p_eq = 2.6e-3
p_eq_reset = 4.5e-4
f_ro = 0.84

[qubit.1]
omega_ge = 6.284e9
chi_self = -1.2e8
chi_left = -2e6
chi_right = -1.775e6
t1 = 15e-6
t1_pumped = 15e-6
p_eq = 3.1e-3
p_eq_reset = 3.3e-4
f_ro = 0.88

[pump.0]
xi = 0.0688246
delta_p = 0

[pump.1]
xi = 0.0663430
delta_p = 0

[cycle]
t_d = 13e-6
t_ro = 1.5e-6
t_reset = 128e-9
n_reset = 1.33

[environment]
temperature = 0.044

[noise]
alpha_pump = 0.12
alpha_ro = 0
)cfg";

/// Idealized single-stage chain at unit cooperativity: matched 1 MHz ports,
/// |g| = sqrt(kappa_b kappa_w)/2 via xi = 1/(4 pi) on 1 MHz shifts.
constexpr const char* k_lossless_n1_cfg = R"cfg(# Idealized lossless single-stage chain at unit cooperativity.

[mode.0]
role = buffer
omega = 9e9
kappa_ext = 1e6
kappa_int = 0

[mode.1]
role = waste
omega = 7e9
kappa_ext = 1e6
kappa_int = 0

[qubit.0]
omega_ge = 6e9
chi_left = -1e6
chi_right = -1e6
t1 = 30e-6

[pump.0]
xi = 0.07957747154594767
delta_p = 0

[cycle]
t_d = 13e-6
t_ro = 1.5e-6
t_reset = 128e-9
n_reset = 1
)cfg";

constexpr const char* k_lossless_n2_cfg = R"cfg(# Idealized lossless two-stage chain at unit cooperativity.

[mode.0]
role = buffer
omega = 9e9
kappa_ext = 1e6
kappa_int = 0

[mode.1]
role = memory
omega = 8e9
kappa_ext = 0
kappa_int = 0

[mode.2]
role = waste
omega = 7e9
kappa_ext = 1e6
kappa_int = 0

[qubit.0]
omega_ge = 6e9
chi_left = -1e6
chi_right = -1e6
t1 = 30e-6

[qubit.1]
omega_ge = 6.3e9
chi_left = -1e6
chi_right = -1e6
t1 = 15e-6

[pump.0]
xi = 0.07957747154594767
delta_p = 0

[pump.1]
xi = 0.07957747154594767
delta_p = 0

[cycle]
t_d = 13e-6
t_ro = 1.5e-6
t_reset = 128e-9
n_reset = 1
)cfg";

} // namespace

std::vector<std::string> fixture_names() {
    return {"reference", "lossless-n1", "lossless-n2"};
}

bool is_fixture_name(const std::string& name) {
    for (const auto& n : fixture_names())
        if (n == name) return true;
    return false;
}

std::string fixture_config_text(const std::string& name) {
    if (name == "reference") return k_reference_cfg;
    if (name == "lossless-n1") return k_lossless_n1_cfg;
    if (name == "lossless-n2") return k_lossless_n2_cfg;
    throw ConfigError("fixture", "unknown fixture '" + name +
                                     "'; available: reference, lossless-n1, "
                                     "lossless-n2");
}

DeviceConfig fixture_device(const std::string& name) {
    return load_device(parse_config_text(fixture_config_text(name)));
}

namespace {

QubitSpec unit_qubit() {
    QubitSpec q;
    q.omega_ge = 1.0;
    q.chi_left = 1.0;
    q.chi_right = 1.0;
    return q;
}

ModeSpec bare_mode(ModeRole role, double kappa_ext, double kappa_int) {
    ModeSpec m;
    m.role = role;
    m.omega = 1.0;
    m.kappa_ext = kappa_ext;
    m.kappa_int = kappa_int;
    return m;
}

} // namespace

ChainSpec single_stage_chain(double kappa_b_ext, double kappa_b_int,
                             double kappa_w_ext, double kappa_w_int, Complex g) {
    ChainSpec chain;
    chain.modes = {bare_mode(ModeRole::buffer, kappa_b_ext, kappa_b_int),
                   bare_mode(ModeRole::waste, kappa_w_ext, kappa_w_int)};
    chain.qubits = {unit_qubit()};
    chain.pumps = {PumpSpec{-g, 0.0}};  // unit shifts make g4 = -xi
    chain.validate();
    return chain;
}

ChainSpec two_stage_chain(double kappa_b_ext, double kappa_b_int,
                          double kappa_m_ext, double kappa_m_int,
                          double kappa_w_ext, double kappa_w_int, Complex g0,
                          Complex g1) {
    ChainSpec chain;
    chain.modes = {bare_mode(ModeRole::buffer, kappa_b_ext, kappa_b_int),
                   bare_mode(ModeRole::memory, kappa_m_ext, kappa_m_int),
                   bare_mode(ModeRole::waste, kappa_w_ext, kappa_w_int)};
    chain.qubits = {unit_qubit(), unit_qubit()};
    chain.pumps = {PumpSpec{-g0, 0.0}, PumpSpec{-g1, 0.0}};
    chain.validate();
    return chain;
}

} // namespace csmpd
