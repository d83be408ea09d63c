#pragma once

#include <numbers>

namespace cqnc {

// CODATA 2018 exact / recommended values.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;   // J s
    static constexpr double k_B = 1.380649e-23;       // J/K
    static constexpr double c_light = 299792458.0;    // m/s
    static constexpr double eps0 = 8.8541878128e-12;  // F/m
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double f_hz) noexcept { return two_pi * f_hz; }
constexpr double rad_to_hz(double omega) noexcept { return omega / two_pi; }

} // namespace cqnc
