#pragma once

// Closed-form susceptibilities, transfer coefficients of the meter phase
// output and the dimensionless added-force-noise budgets.
//
// Sign convention: i w x = M x + A x_in, so chi_c = 1 / (i w + kappa_c / 2).
//
// The ancilla shot-noise term carries the prefactor that follows from the
// linear model, kappa_a |chi_a|^2 / (2 gamma_m |chi_m|^2) [...]: its transfer
// coefficient is sqrt(kappa_a G) chi_a. The resulting bound
// S_CQNC = (w^2 + w_m^2 + gamma_m^2 / 4) / (2 w_m^2) equals S_SQL on resonance
// and S_SQL / (2 Q_m) off resonance.

#include "cqnc/errors.hpp"
#include "cqnc/params.hpp"

#include <cmath>
#include <complex>

namespace cqnc {

using cplx = std::complex<double>;

enum class Thermal { include, exclude };

/// Mechanical susceptibility w_m / ((w^2 - w_m^2) - i w gamma_m).
inline cplx chi_m(double omega, double omega_m, double gamma_m)
{
    return omega_m / cplx(omega * omega - omega_m * omega_m, -omega * gamma_m);
}

/// Ancilla susceptibility Delta / ((w^2 - Delta^2 - kappa_a^2 / 4) - i w kappa_a).
inline cplx chi_a(double omega, double detuning, double kappa_a)
{
    return detuning / cplx(omega * omega - detuning * detuning - kappa_a * kappa_a / 4.0, -omega * kappa_a);
}

/// Meter-cavity susceptibility 1 / (i w + kappa_c / 2).
inline cplx chi_c(double omega, double kappa_c) { return 1.0 / cplx(kappa_c / 2.0, omega); }

inline cplx chi_m(double omega, const ModelParams& p) { return chi_m(omega, p.omega_m, p.gamma_m); }
inline cplx chi_a(double omega, const ModelParams& p) { return chi_a(omega, p.detuning, p.kappa_a); }
inline cplx chi_c(double omega, const ModelParams& p) { return chi_c(omega, p.kappa_c); }

/// Closed forms assume the meter linewidth exceeds the measurement frequency.
inline bool within_broadband(double omega, const ModelParams& p) { return std::abs(omega) <= p.kappa_c / 10.0; }

// Coefficients of each input in the meter phase output p_c_out(w).
struct TransferCoeffs {
    cplx phase_in;              // p_c_in (shot noise)
    cplx force;                 // f_T + F
    cplx amplitude_in;          // x_c_in (backaction)
    cplx ancilla_amplitude_in;  // x_a_in
    cplx ancilla_phase_in;      // p_a_in
    bool broadband = true;      // false when w > kappa_c / 10
};

/// Ancilla decoupled (g_BS = g_DC = 0); exact in chi_c.
inline TransferCoeffs coeffs_standard(double omega, const ModelParams& p)
{
    check(p);
    const cplx cc = chi_c(omega, p);
    const cplx cm = chi_m(omega, p);
    TransferCoeffs t;
    t.phase_in = cplx(-p.kappa_c / 2.0, omega) / cplx(p.kappa_c / 2.0, omega);
    t.force = std::sqrt(p.gamma_m * p.kappa_c) * p.g * cc * cm;
    t.amplitude_in = p.kappa_c * p.g * p.g * cc * cc * cm;
    t.ancilla_amplitude_in = 0.0;
    t.ancilla_phase_in = 0.0;
    t.broadband = within_broadband(omega, p);
    return t;
}

/// Ideal coupling g_BS = g_DC = g / 2 (p.g_bs and p.g_dc are ignored); exact in chi_c.
/// With chi_c -> 2 / kappa_c this reduces to the broadband form with
/// G [chi_m + chi_a] backaction and sqrt(kappa_a G) chi_a ancilla terms.
inline TransferCoeffs coeffs_cqnc(double omega, const ModelParams& p)
{
    check(p);
    if (p.detuning == 0.0) {
        throw Error(ErrorCode::delta_zero, "ancilla detuning must be nonzero for CQNC coefficients");
    }
    const cplx cc = chi_c(omega, p);
    const cplx cm = chi_m(omega, p);
    const cplx ca = chi_a(omega, p);
    const cplx ancilla = -std::sqrt(p.kappa_c * p.kappa_a) * p.g * cc * ca;

    TransferCoeffs t;
    t.phase_in = cplx(-p.kappa_c / 2.0, omega) / cplx(p.kappa_c / 2.0, omega);
    t.force = std::sqrt(p.gamma_m * p.kappa_c) * p.g * cc * cm;
    t.amplitude_in = p.kappa_c * p.g * p.g * cc * cc * (cm + ca);
    t.ancilla_amplitude_in = ancilla * cplx(p.kappa_a / 2.0, omega) / p.detuning;
    t.ancilla_phase_in = ancilla;
    t.broadband = within_broadband(omega, p);
    return t;
}

/// Force PSD of the unbiased estimator p_c_out / coeffs.force, vacuum inputs 1/2.
inline double force_psd(const TransferCoeffs& t, double nbar)
{
    const double s_pp = 0.5 * (std::norm(t.phase_in) + std::norm(t.amplitude_in) +
                               std::norm(t.ancilla_amplitude_in) + std::norm(t.ancilla_phase_in)) +
                        nbar * std::norm(t.force);
    return s_pp / std::norm(t.force);
}

struct NoiseBudget {
    double thermal = 0.0;
    double shot = 0.0;
    double ancilla = 0.0;
    double backaction = 0.0;
    bool broadband = true;

    double total() const { return thermal + shot + ancilla + backaction; }
};

namespace detail {

inline void require_positive_strength(double G)
{
    if (!(G > 0.0) || !std::isfinite(G)) {
        throw Error(ErrorCode::invalid_parameter, "measurement strength G must be positive and finite");
    }
}

inline double shot_term(double omega, double G, const ModelParams& p)
{
    return 1.0 / (2.0 * p.gamma_m * G * std::norm(chi_m(omega, p)));
}

} // namespace detail

/// Ancilla shot noise referred to force, independent of G.
inline double ancilla_noise(double omega, const ModelParams& p)
{
    if (p.detuning == 0.0) {
        throw Error(ErrorCode::delta_zero, "ancilla detuning must be nonzero");
    }
    const double ka = p.kappa_a;
    const double bracket = (omega * omega + ka * ka / 4.0) / (p.detuning * p.detuning) + 1.0;
    return ka * std::norm(chi_a(omega, p)) / (2.0 * p.gamma_m * std::norm(chi_m(omega, p))) * bracket;
}

/// Standard readout: thermal + shot + backaction.
inline NoiseBudget s_add_standard(double omega, double G, const ModelParams& p, Thermal thermal = Thermal::include)
{
    check(p);
    detail::require_positive_strength(G);
    NoiseBudget b;
    b.thermal = thermal == Thermal::include ? p.nbar : 0.0;
    b.shot = detail::shot_term(omega, G, p);
    b.backaction = G / (2.0 * p.gamma_m);
    b.broadband = within_broadband(omega, p);
    return b;
}

inline double s_sql(double omega, const ModelParams& p) { return 1.0 / (p.gamma_m * std::abs(chi_m(omega, p))); }
inline double g_sql(double omega, const ModelParams& p) { return 1.0 / std::abs(chi_m(omega, p)); }

/// Perfect backaction cancellation: shot + ancilla (+ thermal), no backaction.
inline NoiseBudget s_cqnc_ideal(double omega, double G, const ModelParams& p, Thermal thermal = Thermal::include)
{
    check(p);
    detail::require_positive_strength(G);
    NoiseBudget b;
    b.thermal = thermal == Thermal::include ? p.nbar : 0.0;
    b.shot = detail::shot_term(omega, G, p);
    b.ancilla = ancilla_noise(omega, p);
    b.broadband = within_broadband(omega, p);
    return b;
}

/// Residual backaction (G / 2 gamma_m) |(chi_m + chi_a) / chi_m|^2 on top of the ideal budget.
inline NoiseBudget s_cqnc_nonideal(double omega, double G, const ModelParams& p, Thermal thermal = Thermal::include)
{
    NoiseBudget b = s_cqnc_ideal(omega, G, p, thermal);
    const cplx cm = chi_m(omega, p);
    b.backaction = G / (2.0 * p.gamma_m) * std::norm((cm + chi_a(omega, p)) / cm);
    return b;
}

/// Large-G limit of the ideal budget under Delta = -w_m, kappa_a = gamma_m.
inline double s_cqnc_bound(double omega, const ModelParams& p)
{
    const double wm2 = p.omega_m * p.omega_m;
    return (omega * omega + wm2 + p.gamma_m * p.gamma_m / 4.0) / (2.0 * wm2);
}

struct CqncThreshold {
    double strength = 0.0;      // G at which shot noise equals the ancilla term
    double ratio_to_sql = 0.0;  // strength / G_SQL
};

/// Measurement strength above which ancilla noise dominates shot noise.
/// Under Delta = -w_m, kappa_a = gamma_m this is w_m^2 / (gamma_m |chi_m|^2 (w^2 + w_m^2 + gamma_m^2 / 4)).
inline CqncThreshold g_cqnc_required(double omega, const ModelParams& p)
{
    check(p);
    CqncThreshold t;
    t.strength = 1.0 / (2.0 * p.gamma_m * std::norm(chi_m(omega, p)) * ancilla_noise(omega, p));
    t.ratio_to_sql = t.strength / g_sql(omega, p);
    return t;
}

} // namespace cqnc
