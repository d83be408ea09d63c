#pragma once

// Laboratory parameters, the reduced rate model, coupling constants and
// diagnostics. All rates are angular (rad/s).

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cqnc {

struct MechanicalParams {
    double omega_m = 0.0;      // rad/s
    double gamma_m = 0.0;      // rad/s
    double mass = 0.0;         // kg
    double temperature = 0.0;  // K

    double quality_factor() const { return omega_m / gamma_m; }
};

struct OpticalSetup {
    double cavity_length = 0.0;              // m
    double kappa_c = 0.0;                    // rad/s, full energy decay rate
    double kappa_a = 0.0;                    // rad/s
    double detuning = 0.0;                   // rad/s
    double carrier_omega_c = 0.0;            // rad/s
    double input_power = 0.0;                // W
    double beamsplitter_reflectivity = 0.0;  // fraction in [0, 1)

    double finesse() const { return std::numbers::pi * PhysicalConstants::c_light / (kappa_c * cavity_length); }
};

struct OpaParams {
    double crystal_length = 0.0;  // m
    double pump_intensity = 0.0;  // W/m^2
    double d_eff = 0.0;           // m/V
    double n1 = 1.0;
    double n2 = 1.0;
    double n3 = 1.0;
    double omega1 = 0.0;  // rad/s, signal
    double omega2 = 0.0;  // rad/s, idler
};

// Reduced model consumed by every engine.
struct ModelParams {
    double omega_m = 0.0;
    double gamma_m = 0.0;
    double kappa_c = 0.0;
    double kappa_a = 0.0;
    double detuning = 0.0;
    double g = 0.0;
    double g_bs = 0.0;
    double g_dc = 0.0;
    double nbar = 0.0;

    /// Broadband measurement strength G = 4 g^2 / kappa_c.
    double measurement_strength() const { return 4.0 * g * g / kappa_c; }
    double quality_factor() const { return omega_m / gamma_m; }
};

/// Coupling g that realizes measurement strength G for a given meter linewidth.
inline double coupling_for_strength(double G, double kappa_c) { return 0.5 * std::sqrt(G * kappa_c); }

struct MismatchSpec {
    double eps1 = 0.0;
    double eps2 = 0.0;
};

enum class DiagnosticKind {
    stability_hint,
    not_sideband_resolved,
    low_q,
    large_mismatch,
};

constexpr std::string_view to_string(DiagnosticKind kind) noexcept
{
    switch (kind) {
    case DiagnosticKind::stability_hint: return "STABILITY_HINT";
    case DiagnosticKind::not_sideband_resolved: return "NOT_SIDEBAND_RESOLVED";
    case DiagnosticKind::low_q: return "LOW_Q";
    case DiagnosticKind::large_mismatch: return "LARGE_MISMATCH";
    }
    return "UNKNOWN";
}

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
};

namespace detail {

inline void require_finite(double value, std::string_view name)
{
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::non_finite, std::string(name) + " is not finite");
    }
}

inline void require_positive(double value, std::string_view name)
{
    require_finite(value, name);
    if (!(value > 0.0)) {
        std::ostringstream os;
        os << name << " must be > 0 (got " << value << ")";
        throw Error(ErrorCode::invalid_parameter, os.str());
    }
}

inline void require_non_negative(double value, std::string_view name)
{
    require_finite(value, name);
    if (value < 0.0) {
        std::ostringstream os;
        os << name << " must be >= 0 (got " << value << ")";
        throw Error(ErrorCode::invalid_parameter, os.str());
    }
}

} // namespace detail

inline void check(const MechanicalParams& mech)
{
    detail::require_positive(mech.omega_m, "omega_m");
    detail::require_positive(mech.gamma_m, "gamma_m");
    detail::require_positive(mech.mass, "mass");
    detail::require_non_negative(mech.temperature, "temperature");
}

inline void check(const OpticalSetup& opt)
{
    detail::require_positive(opt.cavity_length, "cavity_length");
    detail::require_positive(opt.kappa_c, "kappa_c");
    detail::require_positive(opt.kappa_a, "kappa_a");
    detail::require_finite(opt.detuning, "detuning");
    detail::require_positive(opt.carrier_omega_c, "carrier_omega_c");
    detail::require_non_negative(opt.input_power, "input_power");
    detail::require_non_negative(opt.beamsplitter_reflectivity, "reflectivity");
    if (opt.beamsplitter_reflectivity >= 1.0) {
        throw Error(ErrorCode::invalid_parameter, "reflectivity must be < 1");
    }
}

// Pump intensity may be zero (pump off); everything else must be positive.
inline void check(const OpaParams& opa)
{
    detail::require_positive(opa.crystal_length, "crystal_length");
    detail::require_non_negative(opa.pump_intensity, "pump_intensity");
    detail::require_positive(opa.d_eff, "d_eff");
    detail::require_positive(opa.n1, "n1");
    detail::require_positive(opa.n2, "n2");
    detail::require_positive(opa.n3, "n3");
    detail::require_positive(opa.omega1, "omega1");
    detail::require_positive(opa.omega2, "omega2");
}

inline void check(const ModelParams& p)
{
    detail::require_positive(p.omega_m, "omega_m");
    detail::require_positive(p.gamma_m, "gamma_m");
    detail::require_positive(p.kappa_c, "kappa_c");
    detail::require_positive(p.kappa_a, "kappa_a");
    detail::require_finite(p.detuning, "detuning");
    detail::require_non_negative(p.g, "g");
    detail::require_non_negative(p.g_bs, "g_bs");
    detail::require_non_negative(p.g_dc, "g_dc");
    detail::require_non_negative(p.nbar, "nbar");
}

inline double zero_point_fluctuation(const MechanicalParams& mech)
{
    return std::sqrt(PhysicalConstants::hbar / (mech.mass * mech.omega_m));
}

/// Thermal occupancy in the high-temperature limit, k_B T / (hbar omega_m).
inline double thermal_occupancy(double temperature, double omega_m)
{
    return PhysicalConstants::k_B * temperature / (PhysicalConstants::hbar * omega_m);
}

/// Intracavity amplitude alpha_c = sqrt(P / (hbar omega_c kappa_c)).
inline double intracavity_amplitude(const OpticalSetup& opt)
{
    return std::sqrt(opt.input_power / (PhysicalConstants::hbar * opt.carrier_omega_c * opt.kappa_c));
}

/// Parametric gain of the OPA crystal in 1/m.
inline double opa_gain(const OpaParams& opa)
{
    check(opa);
    constexpr double c = PhysicalConstants::c_light;
    const double radicand = 2.0 * opa.omega1 * opa.omega2 * opa.d_eff * opa.d_eff * opa.pump_intensity /
                            (opa.n1 * opa.n2 * opa.n3 * PhysicalConstants::eps0 * c * c * c);
    const double gain = std::sqrt(radicand);
    detail::require_finite(gain, "opa gain");
    return gain;
}

inline ModelParams derive_model(const MechanicalParams& mech, const OpticalSetup& opt, const OpaParams& opa)
{
    check(mech);
    if (!(opt.carrier_omega_c > 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "carrier_omega_c must be > 0");
    }
    check(opt);

    constexpr double c = PhysicalConstants::c_light;
    ModelParams p;
    p.omega_m = mech.omega_m;
    p.gamma_m = mech.gamma_m;
    p.kappa_c = opt.kappa_c;
    p.kappa_a = opt.kappa_a;
    p.detuning = opt.detuning;
    p.g = opt.carrier_omega_c * zero_point_fluctuation(mech) * intracavity_amplitude(opt) / opt.cavity_length;
    p.g_bs = opt.beamsplitter_reflectivity * c / opt.cavity_length;
    p.g_dc = opa_gain(opa) * opa.crystal_length * c / opt.cavity_length;
    p.nbar = thermal_occupancy(mech.temperature, mech.omega_m);

    detail::require_finite(p.g, "g");
    detail::require_finite(p.g_bs, "g_bs");
    detail::require_finite(p.g_dc, "g_dc");
    detail::require_finite(p.nbar, "nbar");
    return p;
}

/// Beamsplitter and down-conversion couplings for a relative mismatch from g/2 each.
inline std::pair<double, double> apply_mismatch(double g, const MismatchSpec& spec)
{
    detail::require_non_negative(g, "g");
    detail::require_finite(spec.eps1, "eps1");
    detail::require_finite(spec.eps2, "eps2");
    if (std::abs(spec.eps1) >= 1.0 || std::abs(spec.eps2) >= 1.0) {
        throw Error(ErrorCode::invalid_parameter, "|eps1| and |eps2| must be < 1");
    }
    const double g_bs = 0.5 * ((1.0 + spec.eps1) * g + spec.eps2 * g);
    const double g_dc = 0.5 * ((1.0 + spec.eps1) * g - spec.eps2 * g);
    return {g_bs, g_dc};
}

/// Inverse of apply_mismatch. Requires g > 0.
inline MismatchSpec recover_mismatch(double g, double g_bs, double g_dc)
{
    detail::require_positive(g, "g");
    return {(g_bs + g_dc) / g - 1.0, (g_bs - g_dc) / g};
}

inline std::vector<Diagnostic> check_mismatch(const MismatchSpec& spec)
{
    std::vector<Diagnostic> out;
    if (std::abs(spec.eps1) > 0.5 || std::abs(spec.eps2) > 0.5) {
        std::ostringstream os;
        os << "mismatch beyond 50 %: eps1=" << spec.eps1 << " eps2=" << spec.eps2;
        out.push_back({DiagnosticKind::large_mismatch, os.str()});
    }
    return out;
}

// Advisory only; the state-space eigenvalue check is authoritative for stability.
inline std::vector<Diagnostic> validate(const ModelParams& p)
{
    std::vector<Diagnostic> out;
    if (p.g > p.omega_m) {
        std::ostringstream os;
        os << "g=" << p.g << " rad/s exceeds omega_m=" << p.omega_m << " rad/s";
        out.push_back({DiagnosticKind::stability_hint, os.str()});
    }
    if (p.kappa_a >= p.omega_m) {
        std::ostringstream os;
        os << "kappa_a=" << p.kappa_a << " rad/s >= omega_m=" << p.omega_m << " rad/s";
        out.push_back({DiagnosticKind::not_sideband_resolved, os.str()});
    }
    if (p.omega_m / p.gamma_m <= 10.0) {
        std::ostringstream os;
        os << "Q_m=" << p.omega_m / p.gamma_m << " <= 10";
        out.push_back({DiagnosticKind::low_q, os.str()});
    }
    return out;
}

/// Dimensionless force PSD to N^2/Hz: hbar m gamma_m omega_m S.
inline double to_si_force_psd(double s_dimensionless, const MechanicalParams& mech)
{
    return PhysicalConstants::hbar * mech.mass * mech.gamma_m * mech.omega_m * s_dimensionless;
}

} // namespace cqnc
