#pragma once

#include "cqnc/cqnc.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace cqnc::testing {

inline MechanicalParams design_mechanics()
{
    return {hz_to_rad(0.5e6), hz_to_rad(5e3), 1e-12, 300.0};
}

inline OpticalSetup design_optics()
{
    const double omega_c = two_pi * PhysicalConstants::c_light / 1064e-9;
    return {1.5, hz_to_rad(1e6), hz_to_rad(0.2e6), hz_to_rad(-0.5e6), omega_c, 0.1, 0.005};
}

inline OpaParams design_opa()
{
    const double omega_c = two_pi * PhysicalConstants::c_light / 1064e-9;
    return {1.06e-2, 45e4, 10e-12, 1.83, 1.83, 1.79, omega_c, omega_c};
}

// Design point with the listed couplings g = 300 kHz, g_BS = g_DC = 150 kHz.
inline ModelParams design_model()
{
    ModelParams p;
    p.omega_m = hz_to_rad(0.5e6);
    p.gamma_m = hz_to_rad(5e3);
    p.kappa_c = hz_to_rad(1e6);
    p.kappa_a = hz_to_rad(0.2e6);
    p.detuning = hz_to_rad(-0.5e6);
    p.g = hz_to_rad(300e3);
    p.g_bs = hz_to_rad(150e3);
    p.g_dc = hz_to_rad(150e3);
    p.nbar = thermal_occupancy(300.0, p.omega_m);
    return p;
}

// Dimensionless units with w_m = 1.
inline ModelParams unit_model(double q, double kappa_a, double kappa_c = 1e3)
{
    ModelParams p;
    p.omega_m = 1.0;
    p.gamma_m = 1.0 / q;
    p.kappa_c = kappa_c;
    p.kappa_a = kappa_a;
    p.detuning = -1.0;
    p.g = 0.1;
    p.g_bs = 0.05;
    p.g_dc = 0.05;
    p.nbar = 0.0;
    return p;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = lo * std::pow(hi / lo, t);
    }
    return out;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// Random draw in units of w_m; ancilla detuned near -w_m, couplings below w_m.
inline ModelParams random_model(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    p.omega_m = log_uniform(rng, 0.1, 10.0);
    p.gamma_m = p.omega_m / log_uniform(rng, 20.0, 1e5);
    p.kappa_c = p.omega_m * log_uniform(rng, 0.5, 1e3);
    p.kappa_a = p.omega_m * log_uniform(rng, 1e-3, 1.0);
    p.detuning = -p.omega_m * (0.5 + u(rng));
    p.g = p.omega_m * log_uniform(rng, 1e-3, 0.3);
    p.g_bs = p.g * 0.5 * (0.8 + 0.4 * u(rng));
    p.g_dc = p.g * 0.5 * (0.8 + 0.4 * u(rng));
    p.nbar = log_uniform(rng, 1e-2, 1e3);
    return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace cqnc::testing
