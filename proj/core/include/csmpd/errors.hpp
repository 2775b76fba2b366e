#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace csmpd {

/// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: bad config file, out-of-range field, missing key.
/// `key` names the offending entry so the CLI can report it (exit code 2).
struct ConfigError : Error {
    std::string key;
    ConfigError(std::string key_, const std::string& what)
        : Error("config error [" + key_ + "]: " + what), key(std::move(key_)) {}
};

/// A computation could not be carried out (singular system, no convergence,
/// step-size underflow, ...). Maps to CLI exit code 1.
struct NumericalError : Error {
    using Error::Error;
};

/// The |S21|^2 response has several local maxima above half of the global
/// one, so a scalar FWHM is meaningless. Carries the peak detunings [rad/s].
struct MultiPeakError : NumericalError {
    std::vector<double> peak_deltas;
    explicit MultiPeakError(std::vector<double> peaks)
        : NumericalError("response has " + std::to_string(peaks.size()) +
                         " maxima; FWHM is not defined"),
          peak_deltas(std::move(peaks)) {}
};

/// A sampled quantity was requested on a grid too coarse to resolve it.
/// `required_spacing` is the maximum admissible spacing in the same units.
struct GridError : NumericalError {
    double required_spacing;
    GridError(double required, const std::string& what)
        : NumericalError(what), required_spacing(required) {}
};

} // namespace csmpd
