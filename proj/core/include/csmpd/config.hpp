#pragma once

#include <map>
#include <string>

#include "csmpd/model.hpp"

namespace csmpd {

/// Raw section -> key -> value view of a config file, before any unit
/// conversion. Section and key order is irrelevant.
struct ParsedConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
};

/// Everything a run needs beside command-line flags.
struct DeviceConfig {
    ChainSpec chain;
    CycleSpec cycle;
    Environment environment;
    double alpha_pump = 0.0;  // [1/s], empirical input
    double alpha_ro = 0.0;    // [1/s], empirical input
};

/// Parses the flat INI-style format: `[section]` headers, `key = value`
/// lines, `#` comments. Sections: mode.<k>, qubit.<k>, pump.<k>, cycle,
/// environment, noise.
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

/// Builds and validates the domain objects. Frequencies (omega, omega_ge,
/// chi_*, delta_p) are given in Hz in the file and converted to angular
/// units here — this is the only place the 2pi conversion happens. Decay
/// rates (kappa_*) and the alpha_* inputs are plain 1/s, durations seconds.
DeviceConfig load_device(const ParsedConfig& cfg);
DeviceConfig load_device_file(const std::string& path);

} // namespace csmpd
