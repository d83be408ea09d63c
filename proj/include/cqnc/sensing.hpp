#pragma once

// Force estimation on top of the two engines: force PSD spectra, power
// optimization, improvement ratios, coupling-mismatch scans and the
// fixed-power case study.

#include "cqnc/analytic.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/golden_section.hpp"
#include "cqnc/parallel.hpp"
#include "cqnc/params.hpp"
#include "cqnc/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string_view>
#include <tuple>
#include <vector>

namespace cqnc {

enum class Route {
    statespace,
    analytic_standard,
    analytic_cqnc_ideal,
    analytic_cqnc_nonideal,
};

constexpr std::string_view to_string(Route r) noexcept
{
    switch (r) {
    case Route::statespace: return "STATESPACE";
    case Route::analytic_standard: return "ANALYTIC_STANDARD";
    case Route::analytic_cqnc_ideal: return "ANALYTIC_CQNC_IDEAL";
    case Route::analytic_cqnc_nonideal: return "ANALYTIC_CQNC_NONIDEAL";
    }
    return "UNKNOWN";
}

struct SensingOptions {
    Thermal thermal = Thermal::exclude;
    // Re-apply the configured (eps1, eps2) relation when g is varied; otherwise g_BS, g_DC stay fixed.
    bool track_couplings = true;
    ChannelMask channels = all_channels;
};

struct ForceNoiseSpectrum {
    std::vector<double> omega;
    std::vector<double> s_f;
    std::vector<double> s_f_si;  // empty unless a mass was supplied
    Route route = Route::statespace;
    std::vector<double> g_used;
};

// ---------------------------------------------------------------------------
// Single-frequency state-space evaluation

struct NumericPoint {
    double s_f = 0.0;
    double s_pp = 0.0;
    cplx force_gain;  // P(p_c, f + F); the estimator divides p_c_out by this
};

inline NumericPoint numeric_point(const StateSpace& ss, double omega, double nbar, const ChannelMask& channels = all_channels)
{
    const TransferMatrix t = transfer_matrix(ss, omega);
    const OutputSpectrumMatrix s_out = output_spectrum(t, input_spectrum(nbar, channels));
    NumericPoint pt;
    pt.force_gain = t.entries(basis::p_c, basis::force_in);
    pt.s_pp = s_out.s_pp();
    pt.s_f = pt.s_pp / std::norm(pt.force_gain);
    return pt;
}

namespace detail {

inline void require_increasing(std::span<const double> grid)
{
    if (grid.empty()) throw Error(ErrorCode::invalid_parameter, "empty frequency grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require_finite(grid[i], "omega");
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::invalid_parameter, "frequency grid must be strictly increasing");
        }
    }
}

inline void require_stable(const StateSpace& ss)
{
    const StabilityReport r = analyze_stability(ss);
    if (!r.stable()) {
        std::ostringstream os;
        os << "spectral abscissa " << r.spectral_abscissa << " rad/s is not negative";
        throw Error(ErrorCode::unstable_system, os.str());
    }
}

} // namespace detail

/// Force PSD on a grid at the configured power (G = 4 g^2 / kappa_c).
inline ForceNoiseSpectrum force_psd_numeric(const ModelParams& p, std::span<const double> omega_grid,
                                            const SensingOptions& opts = {},
                                            std::optional<double> mass = std::nullopt)
{
    check(p);
    detail::require_increasing(omega_grid);
    if (!(p.g > 0.0)) throw Error(ErrorCode::invalid_parameter, "g must be > 0 for force estimation");
    const StateSpace ss = build_matrices(p);
    detail::require_stable(ss);

    const double nbar = opts.thermal == Thermal::include ? p.nbar : 0.0;
    ForceNoiseSpectrum out;
    out.route = Route::statespace;
    out.omega.assign(omega_grid.begin(), omega_grid.end());
    out.s_f.resize(out.omega.size());
    out.g_used.assign(out.omega.size(), p.g);
    parallel_for(out.omega.size(), [&](std::size_t i) {
        out.s_f[i] = numeric_point(ss, out.omega[i], nbar, opts.channels).s_f;
    });
    if (mass) {
        const MechanicalParams mech{p.omega_m, p.gamma_m, *mass, 0.0};
        out.s_f_si.reserve(out.s_f.size());
        for (double s : out.s_f) out.s_f_si.push_back(to_si_force_psd(s, mech));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Power optimization

/// Parameters with the optomechanical coupling set to realize measurement strength G.
inline ModelParams with_strength(const ModelParams& p, double G, bool track_couplings)
{
    ModelParams q = p;
    q.g = coupling_for_strength(G, p.kappa_c);
    if (track_couplings && p.g > 0.0) {
        const double scale = q.g / p.g;
        q.g_bs = p.g_bs * scale;
        q.g_dc = p.g_dc * scale;
    }
    return q;
}

/// Added force noise of one route at measurement strength G. Unstable
/// state-space configurations evaluate to +inf.
inline double route_psd(Route route, double omega, double G, const ModelParams& p, const SensingOptions& opts)
{
    switch (route) {
    case Route::analytic_standard: return s_add_standard(omega, G, p, opts.thermal).total();
    case Route::analytic_cqnc_ideal: return s_cqnc_ideal(omega, G, p, opts.thermal).total();
    case Route::analytic_cqnc_nonideal: return s_cqnc_nonideal(omega, G, p, opts.thermal).total();
    case Route::statespace: {
        const StateSpace ss = build_matrices(with_strength(p, G, opts.track_couplings));
        if (!analyze_stability(ss).stable()) return std::numeric_limits<double>::infinity();
        const double nbar = opts.thermal == Thermal::include ? p.nbar : 0.0;
        return numeric_point(ss, omega, nbar, opts.channels).s_f;
    }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct StrengthBounds {
    double min = 0.0;
    double max = 0.0;
};

/// Default search bracket [1e-6, 1e6] x G_SQL(w).
inline StrengthBounds default_bounds(double omega, const ModelParams& p)
{
    const double gs = g_sql(omega, p);
    return {1e-6 * gs, 1e6 * gs};
}

struct PowerOptimum {
    double strength = 0.0;  // G*
    double s_f = 0.0;       // S_F(G*)
    bool interior = false;  // false reports NO_INTERIOR_MINIMUM
    bool unimodal = false;
};

inline constexpr std::size_t optimizer_samples = 61;
inline constexpr double optimizer_log_tolerance = 1e-10;

inline PowerOptimum optimize_power(const ModelParams& p, double omega, Route route,
                                   std::optional<StrengthBounds> bounds = std::nullopt,
                                   const SensingOptions& opts = {})
{
    check(p);
    const StrengthBounds b = bounds.value_or(default_bounds(omega, p));
    if (!(b.min > 0.0) || !(b.min < b.max) || !std::isfinite(b.max)) {
        throw Error(ErrorCode::invalid_parameter, "strength bounds must satisfy 0 < G_min < G_max");
    }
    const auto objective = [&](double log_g) { return route_psd(route, omega, std::exp(log_g), p, opts); };
    const ScalarMinimum m =
        sampled_minimize(objective, std::log(b.min), std::log(b.max), optimizer_samples, optimizer_log_tolerance);
    if (!std::isfinite(m.value)) {
        std::ostringstream os;
        os << "no stable measurement strength in bracket at omega=" << omega;
        throw Error(ErrorCode::unstable_system, os.str());
    }
    return {std::exp(m.x), m.value, m.interior, m.unimodal};
}

/// Optimized S_F / S_SQL per frequency (thermal excluded unless opts says otherwise).
inline std::vector<double> improvement_ratio(const ModelParams& p, std::span<const double> omega_grid, Route route,
                                             const SensingOptions& opts = {})
{
    detail::require_increasing(omega_grid);
    std::vector<double> ratio(omega_grid.size());
    parallel_for(omega_grid.size(), [&](std::size_t i) {
        const double w = omega_grid[i];
        ratio[i] = optimize_power(p, w, route, std::nullopt, opts).s_f / s_sql(w, p);
    });
    return ratio;
}

// ---------------------------------------------------------------------------
// Mismatch scan

struct ScanPoint {
    MismatchSpec mismatch;
    double spectral_abscissa = 0.0;
    bool stable = false;
    std::vector<std::optional<double>> ratio;  // nullopt marks a gap
};

struct ScanResult {
    std::vector<double> omega;
    std::vector<ScanPoint> points;  // eps1-major, eps2-minor
};

inline ScanResult scan_mismatch(const ModelParams& p, std::span<const double> eps1_list,
                                std::span<const double> eps2_list, std::span<const double> omega_grid,
                                const SensingOptions& opts = {})
{
    check(p);
    detail::require_increasing(omega_grid);
    ScanResult result;
    result.omega.assign(omega_grid.begin(), omega_grid.end());
    for (double e1 : eps1_list) {
        for (double e2 : eps2_list) {
            ScanPoint pt;
            pt.mismatch = {e1, e2};
            pt.ratio.assign(omega_grid.size(), std::nullopt);
            result.points.push_back(std::move(pt));
        }
    }

    const std::size_t n_omega = omega_grid.size();
    // Per-point setup first; invalid mismatches (|eps| >= 1) are hard errors.
    std::vector<ModelParams> models;
    models.reserve(result.points.size());
    for (ScanPoint& pt : result.points) {
        ModelParams q = p;
        std::tie(q.g_bs, q.g_dc) = apply_mismatch(p.g, pt.mismatch);
        const StabilityReport st = analyze_stability(build_matrices(q));
        pt.spectral_abscissa = st.spectral_abscissa;
        pt.stable = st.stable();
        models.push_back(q);
    }

    parallel_for(result.points.size() * n_omega, [&](std::size_t k) {
        const std::size_t ip = k / n_omega;
        const std::size_t iw = k % n_omega;
        ScanPoint& pt = result.points[ip];
        if (!pt.stable) return;
        const double w = omega_grid[iw];
        try {
            pt.ratio[iw] = optimize_power(models[ip], w, Route::statespace, std::nullopt, opts).s_f / s_sql(w, p);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::unstable_system && e.code() != ErrorCode::singular_at_omega) throw;
        }
    });
    return result;
}

// ---------------------------------------------------------------------------
// Fixed-power case study

struct CaseStudyReport {
    std::vector<double> omega;
    std::vector<double> quantum;        // ancilla decoupled
    std::vector<double> cqnc_nonideal;  // couplings and kappa_a as configured
    std::vector<double> cqnc_ideal;     // kappa_a set to gamma_m
    double thermal = 0.0;               // flat nbar, reported separately
    double below_band_max = 0.0;        // rad/s; w <= w_m / sqrt(2)
    double above_band_min = 0.0;        // rad/s; w >= 3 w_m
    double reduction_nonideal_below = std::numeric_limits<double>::quiet_NaN();
    double reduction_ideal_below = std::numeric_limits<double>::quiet_NaN();
    double max_deviation_above = std::numeric_limits<double>::quiet_NaN();
    StabilityReport stability;
    std::vector<Diagnostic> diagnostics;
};

/// Quantum-noise spectra at the configured power (no optimization) and the
/// mean relative reduction below resonance.
inline CaseStudyReport case_study(const ModelParams& p, std::span<const double> omega_grid)
{
    check(p);
    detail::require_increasing(omega_grid);
    CaseStudyReport r;
    r.omega.assign(omega_grid.begin(), omega_grid.end());
    r.thermal = p.nbar;
    r.diagnostics = validate(p);
    r.stability = analyze_stability(build_matrices(p));
    r.below_band_max = p.omega_m / std::numbers::sqrt2;
    r.above_band_min = 3.0 * p.omega_m;

    ModelParams standard = p;
    standard.g_bs = 0.0;
    standard.g_dc = 0.0;
    ModelParams ideal = p;
    ideal.kappa_a = p.gamma_m;

    const SensingOptions quantum_only{Thermal::exclude, true, all_channels};
    r.quantum = force_psd_numeric(standard, omega_grid, quantum_only).s_f;
    r.cqnc_nonideal = force_psd_numeric(p, omega_grid, quantum_only).s_f;
    r.cqnc_ideal = force_psd_numeric(ideal, omega_grid, quantum_only).s_f;

    double sum_nonideal = 0.0;
    double sum_ideal = 0.0;
    std::size_t below = 0;
    double max_dev = 0.0;
    std::size_t above = 0;
    for (std::size_t i = 0; i < r.omega.size(); ++i) {
        if (r.omega[i] <= r.below_band_max) {
            sum_nonideal += 1.0 - r.cqnc_nonideal[i] / r.quantum[i];
            sum_ideal += 1.0 - r.cqnc_ideal[i] / r.quantum[i];
            ++below;
        }
        if (r.omega[i] >= r.above_band_min) {
            max_dev = std::max(max_dev, std::abs(r.cqnc_nonideal[i] / r.quantum[i] - 1.0));
            max_dev = std::max(max_dev, std::abs(r.cqnc_ideal[i] / r.quantum[i] - 1.0));
            ++above;
        }
    }
    if (below > 0) {
        r.reduction_nonideal_below = sum_nonideal / static_cast<double>(below);
        r.reduction_ideal_below = sum_ideal / static_cast<double>(below);
    }
    if (above > 0) r.max_deviation_above = max_dev;
    return r;
}

} // namespace cqnc
