#pragma once

namespace csmpd {

/// Exact SI values (2019 redefinition).
inline constexpr double k_planck = 6.62607015e-34;      // J s
inline constexpr double k_hbar = 1.054571817e-34;       // J s (h / 2pi, rounded)
inline constexpr double k_boltzmann = 1.380649e-23;     // J / K
inline constexpr double k_two_pi = 6.283185307179586476925286766559;

/// Config files and CSV speak Hz; everything internal is angular [rad/s].
inline constexpr double hz_to_angular(double f_hz) { return k_two_pi * f_hz; }
inline constexpr double angular_to_hz(double w) { return w / k_two_pi; }

} // namespace csmpd
