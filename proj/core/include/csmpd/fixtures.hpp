#pragma once

#include <string>
#include <vector>

#include "csmpd/config.hpp"
#include "csmpd/model.hpp"

namespace csmpd {

/// Bundled device parameter sets. "reference" is the fitted two-stage
/// hardware; the lossless sets are idealized unit-cooperativity chains.
std::vector<std::string> fixture_names();
bool is_fixture_name(const std::string& name);
DeviceConfig fixture_device(const std::string& name);

/// The config-file text each fixture was built from; parsing it reproduces
/// fixture_device(name) exactly.
std::string fixture_config_text(const std::string& name);

/// Bare chain builders for programmatic studies: the coupling is set
/// directly (unit dispersive shifts, xi = -g), placeholder frequencies.
ChainSpec single_stage_chain(double kappa_b_ext, double kappa_b_int,
                             double kappa_w_ext, double kappa_w_int, Complex g);
ChainSpec two_stage_chain(double kappa_b_ext, double kappa_b_int,
                          double kappa_m_ext, double kappa_m_int,
                          double kappa_w_ext, double kappa_w_int, Complex g0,
                          Complex g1);

} // namespace csmpd
