#pragma once

#include <numbers>

namespace qnoise::constants {

inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_B = 1.380649e-23;         // J/K
inline constexpr double c_light = 299792458.0;      // m/s
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace qnoise::constants

namespace qnoise {

/// Bose occupation 1/(exp(hbar w / k_B T) - 1); zero at T = 0.
double bose_occupation(double omega, double temperature);

/// High temperature form k_B T / (hbar w), which stands in for n + 1/2.
double classical_occupation(double omega, double temperature);

}  // namespace qnoise
