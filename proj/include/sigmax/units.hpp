#pragma once

#include <numbers>

namespace sigmax::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Angular frequency (rad/s) from a value quoted as f/2pi in MHz.
constexpr double mhz(double f_over_2pi) { return two_pi * 1e6 * f_over_2pi; }
constexpr double ghz(double f_over_2pi) { return two_pi * 1e9 * f_over_2pi; }
constexpr double to_mhz(double omega) { return omega / (two_pi * 1e6); }

constexpr double us(double t) { return 1e-6 * t; }
constexpr double ns(double t) { return 1e-9 * t; }
constexpr double to_us(double t) { return 1e6 * t; }
constexpr double to_ns(double t) { return 1e9 * t; }

}  // namespace sigmax::units
