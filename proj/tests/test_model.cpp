#include <cmath>
#include <complex>

#include "doctest.h"

#include "csmpd/constants.hpp"
#include "csmpd/errors.hpp"
#include "csmpd/fixtures.hpp"
#include "csmpd/model.hpp"
#include "test_util.hpp"

using namespace csmpd;
using csmpd::test::rel;

TEST_CASE("mode roles round-trip through their names") {
    for (const auto role : {ModeRole::buffer, ModeRole::memory, ModeRole::waste,
                            ModeRole::readout})
        CHECK(mode_role_from_string(to_string(role)) == role);
    CHECK_THROWS_AS(mode_role_from_string("drain"), ConfigError);
}

TEST_CASE("total decay rate sums the external and internal channels") {
    ModeSpec m;
    m.kappa_ext = 2.5e6;
    m.kappa_int = 4.0e5;
    CHECK(m.kappa_total() == rel(2.9e6, 1e-15));
}

TEST_CASE("coupling strength is the pump amplitude times the shift geometry") {
    QubitSpec q;
    q.chi_left = -hz_to_angular(1.784e6);
    q.chi_right = -hz_to_angular(2.0e6);
    PumpSpec p;
    p.xi = Complex{0.0688246, 0.0};

    const Complex g = coupling_strength(q, p);
    // Negative real amplitude: the sign convention rides on -xi.
    CHECK(g.real() < 0.0);
    CHECK(g.imag() == 0.0);
    CHECK(std::abs(g) ==
          rel(std::abs(p.xi) * std::sqrt(q.chi_left * q.chi_right), 1e-14));
    // The fitted pump amplitude lands the first stage at ~2pi x 130 kHz.
    CHECK(angular_to_hz(std::abs(g)) == rel(130004.0, 1e-3));

    SUBCASE("mixed-sign dispersive shifts are rejected") {
        q.chi_right = hz_to_angular(2.0e6);
        CHECK_THROWS_AS(coupling_strength(q, p), ConfigError);
    }
    SUBCASE("a vanishing shift degenerates the stage") {
        q.chi_left = 0.0;
        CHECK_THROWS_AS(coupling_strength(q, p), ConfigError);
    }
}

TEST_CASE("the idealized single-stage fixture sits at |g4| = kappa/2") {
    const ChainSpec chain = fixture_device("lossless-n1").chain;
    // xi = 1/(4 pi) on 1 MHz shifts gives exactly half the port rate.
    CHECK(std::abs(chain.g4(0)) == rel(5e5, 1e-12));
    CHECK(chain.g4(0).real() < 0.0);
}

TEST_CASE("chain validation rejects malformed shapes") {
    ChainSpec good = single_stage_chain(1e6, 0.0, 2e6, 0.0, Complex{3e5, 0.0});
    CHECK_NOTHROW(good.validate());

    SUBCASE("mode/qubit/pump counts must match") {
        ChainSpec c = good;
        c.qubits.push_back(c.qubits[0]);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("the chain starts at the buffer") {
        ChainSpec c = good;
        c.modes[0].role = ModeRole::memory;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("the chain ends at the waste") {
        ChainSpec c = good;
        c.modes[1].role = ModeRole::memory;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("only mode 0 may be the buffer") {
        ChainSpec c = two_stage_chain(1e6, 0.0, 0.0, 1e5, 2e6, 0.0,
                                      Complex{3e5, 0.0}, Complex{3e5, 0.0});
        c.modes[1].role = ModeRole::buffer;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("decay rates are nonnegative") {
        ChainSpec c = good;
        c.modes[1].kappa_int = -1.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("reset population cannot exceed the equilibrium one") {
        ChainSpec c = good;
        c.qubits[0].p_eq = 1e-4;
        c.qubits[0].p_eq_reset = 2e-4;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("readout fidelity lives in (0, 1]") {
        ChainSpec c = good;
        c.qubits[0].f_ro = 0.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c.qubits[0].f_ro = 1.2;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("a closed mode is allowed") {
        ChainSpec c = two_stage_chain(0.0, 0.0, 0.0, 0.0, 2e6, 0.0,
                                      Complex{3e5, 0.0}, Complex{3e5, 0.0});
        CHECK_NOTHROW(c.validate());
    }
}

TEST_CASE("adiabatic rates divide the coupling by the neighbour decay") {
    const ChainSpec chain = two_stage_chain(2e6, 0.0, 0.0, 1e5, 4e6, 0.0,
                                            Complex{3e5, 0.0}, Complex{4e5, 0.0});
    CHECK(chain.gamma_mb() == rel(4.0 * 9e10 / 2e6, 1e-12));
    CHECK(chain.gamma_mw() == rel(4.0 * 1.6e11 / 4e6, 1e-12));
    CHECK(chain.gamma_backward(1) == chain.gamma_mb());
    CHECK(chain.gamma_forward(1) == chain.gamma_mw());
    CHECK_THROWS_AS(chain.gamma_backward(0), Error);
    CHECK_THROWS_AS(chain.gamma_forward(2), Error);
}

TEST_CASE("cycle timing composes readouts and resets into the dead time") {
    CycleSpec cycle;
    cycle.t_d = 13e-6;
    cycle.t_ro = 1.5e-6;
    cycle.t_reset = 128e-9;
    cycle.n_reset = 1.33;
    // (n+1) readouts plus n resets: 2.33 x 1.5us + 1.33 x 128ns.
    CHECK(cycle.t_dead() == rel(3.66524e-6, 1e-10));
    CHECK(cycle.t_cycle() == rel(1.666524e-5, 1e-10));
    CHECK(eta_cycle(cycle) == rel(0.780066, 1e-5));

    SUBCASE("durations must be positive") {
        CycleSpec bad = cycle;
        bad.t_d = 0.0;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        bad = cycle;
        bad.n_reset = -0.5;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}

TEST_CASE("environment validation") {
    Environment env;
    env.temperature = -0.01;
    CHECK_THROWS_AS(env.validate(), ConfigError);
    env.temperature = 0.05;
    CHECK_NOTHROW(env.validate());
    env.background_occupations[7e9] = -0.1;
    CHECK_THROWS_AS(env.validate(), ConfigError);
}
