#pragma once

// Subcommand bodies behind the `cqnc` executable. Each writes CSV or text to
// the given streams and returns the process exit code.

#include "cqnc/analytic.hpp"
#include "cqnc/config.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/parallel.hpp"
#include "cqnc/params.hpp"
#include "cqnc/sensing.hpp"
#include "cqnc/statespace.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cqnc {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_partial_failure = 3,
};

struct GridSpec {
    std::optional<double> min_hz;
    std::optional<double> max_hz;
    std::size_t points = 400;
    bool log_spaced = true;
};

enum class RouteSelection { standard, cqnc_ideal, cqnc_nonideal, numeric, all };

inline RouteSelection parse_route(std::string_view name)
{
    if (name == "standard") return RouteSelection::standard;
    if (name == "cqnc-ideal") return RouteSelection::cqnc_ideal;
    if (name == "cqnc-nonideal") return RouteSelection::cqnc_nonideal;
    if (name == "numeric") return RouteSelection::numeric;
    if (name == "all") return RouteSelection::all;
    throw Error(ErrorCode::config, "unknown route `" + std::string(name) + "`");
}

struct RunConfig {
    ResolvedModel resolved;
    GridSpec grid;
    RouteSelection route = RouteSelection::all;
    std::vector<double> eps1_list{0.0};
    std::vector<double> eps2_list{0.0};
    bool thermal = true;
    bool track_couplings = true;
    bool si = false;
};

/// Angular frequency grid; defaults to [w_m / 100, 100 w_m].
inline std::vector<double> make_grid(const GridSpec& spec, double omega_m)
{
    const double lo = spec.min_hz ? hz_to_rad(*spec.min_hz) : omega_m / 100.0;
    const double hi = spec.max_hz ? hz_to_rad(*spec.max_hz) : omega_m * 100.0;
    if (spec.points == 1 && spec.min_hz && (!spec.max_hz || *spec.max_hz == *spec.min_hz)) return {lo};
    if (spec.points < 2) throw Error(ErrorCode::config, "--points must be >= 2");
    if (!(lo < hi)) throw Error(ErrorCode::config, "grid minimum must be below maximum");
    if (spec.log_spaced && !(lo > 0.0)) throw Error(ErrorCode::config, "log grid needs a positive minimum");

    std::vector<double> grid(spec.points);
    const double n = static_cast<double>(spec.points - 1);
    for (std::size_t i = 0; i < spec.points; ++i) {
        const double t = static_cast<double>(i) / n;
        grid[i] = spec.log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

/// 12 significant digits; anything non-finite is written as `nan`.
inline std::string format_number(double v)
{
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

struct Column {
    std::string name;
    std::function<double(double)> eval;  // omega -> value; throws on engine failure
    bool si_convertible = true;
};

inline void report_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err)
{
    for (const Diagnostic& d : diags) err << "warning: " << to_string(d.kind) << ": " << d.message << "\n";
}

inline double optimized(Route route, double omega, const ModelParams& p, const SensingOptions& opts)
{
    return optimize_power(p, omega, route, std::nullopt, opts).s_f;
}

} // namespace detail

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& csv, std::ostream& err)
{
    const ModelParams& p = cfg.resolved.model;
    const std::vector<double> grid = make_grid(cfg.grid, p.omega_m);
    if (cfg.si && !cfg.resolved.mass_kg) throw Error(ErrorCode::config, "--si needs mass_kg in the config");
    detail::report_diagnostics(cfg.resolved.diagnostics, err);

    SensingOptions opts;
    opts.thermal = Thermal::exclude;
    opts.track_couplings = cfg.track_couplings;
    const double thermal = cfg.thermal ? p.nbar : 0.0;
    const auto want = [&](RouteSelection r) { return cfg.route == RouteSelection::all || cfg.route == r; };

    std::vector<detail::Column> columns;
    columns.push_back({"s_sql", [&](double w) { return s_sql(w, p); }});
    if (want(RouteSelection::standard)) {
        columns.push_back({"s_standard", [&](double w) {
                               return detail::optimized(Route::analytic_standard, w, p, opts) + thermal;
                           }});
    }
    if (want(RouteSelection::cqnc_ideal)) {
        columns.push_back({"s_cqnc_ideal", [&](double w) {
                               return detail::optimized(Route::analytic_cqnc_ideal, w, p, opts) + thermal;
                           }});
    }
    if (want(RouteSelection::cqnc_nonideal)) {
        columns.push_back({"s_cqnc_nonideal", [&](double w) {
                               return detail::optimized(Route::analytic_cqnc_nonideal, w, p, opts) + thermal;
                           }});
    }
    if (want(RouteSelection::numeric)) {
        columns.push_back({"s_numeric", [&](double w) {
                               return detail::optimized(Route::statespace, w, p, opts) + thermal;
                           }});
    }
    if (want(RouteSelection::cqnc_nonideal)) {
        columns.push_back({"ratio_nonideal",
                           [&](double w) {
                               return detail::optimized(Route::analytic_cqnc_nonideal, w, p, opts) / s_sql(w, p);
                           },
                           false});
    }

    const std::size_t n_cols = columns.size();
    std::vector<double> values(grid.size() * n_cols);
    std::vector<std::string> failures(grid.size() * n_cols);
    parallel_for(values.size(), [&](std::size_t k) {
        const std::size_t row = k / n_cols;
        const std::size_t col = k % n_cols;
        try {
            values[k] = columns[col].eval(grid[row]);
            if (!std::isfinite(values[k])) failures[k] = "non-finite result";
        } catch (const Error& e) {
            values[k] = std::nan("");
            failures[k] = e.what();
        }
    });

    const bool si = cfg.si;
    const MechanicalParams mech{p.omega_m, p.gamma_m, si ? cfg.resolved.mass_kg.value_or(0.0) : 0.0, 0.0};

    csv << "omega_hz";
    for (const auto& c : columns) csv << "," << c.name;
    if (si) {
        for (const auto& c : columns) {
            if (c.si_convertible) csv << "," << c.name << "_si";
        }
    }
    csv << "\n";
    for (std::size_t row = 0; row < grid.size(); ++row) {
        csv << format_number(rad_to_hz(grid[row]));
        for (std::size_t col = 0; col < n_cols; ++col) csv << "," << format_number(values[row * n_cols + col]);
        if (si) {
            for (std::size_t col = 0; col < n_cols; ++col) {
                if (columns[col].si_convertible) {
                    csv << "," << format_number(to_si_force_psd(values[row * n_cols + col], mech));
                }
            }
        }
        csv << "\n";
    }

    std::size_t failed = 0;
    for (std::size_t k = 0; k < failures.size(); ++k) {
        if (failures[k].empty()) continue;
        if (failed++ < 5) {
            err << "error: omega_hz=" << format_number(rad_to_hz(grid[k / n_cols])) << " column "
                << columns[k % n_cols].name << ": " << failures[k] << "\n";
        }
    }
    if (failed > 0) {
        err << "error: " << failed << " cell(s) failed and were written as nan\n";
        return exit_partial_failure;
    }
    return exit_ok;
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& csv, std::ostream& err)
{
    const ModelParams& p = cfg.resolved.model;
    const std::vector<double> grid = make_grid(cfg.grid, p.omega_m);
    detail::report_diagnostics(cfg.resolved.diagnostics, err);
    for (double e : cfg.eps1_list) detail::report_diagnostics(check_mismatch({e, 0.0}), err);
    for (double e : cfg.eps2_list) detail::report_diagnostics(check_mismatch({0.0, e}), err);

    SensingOptions opts;
    opts.track_couplings = cfg.track_couplings;
    const ScanResult scan = scan_mismatch(p, cfg.eps1_list, cfg.eps2_list, grid, opts);

    std::size_t gaps = 0;
    csv << "eps1,eps2,omega_hz,ratio\n";
    for (const ScanPoint& pt : scan.points) {
        if (!pt.stable) {
            err << "warning: eps1=" << format_number(pt.mismatch.eps1) << " eps2=" << format_number(pt.mismatch.eps2)
                << " unstable (spectral abscissa " << format_number(pt.spectral_abscissa) << " rad/s)\n";
        }
        for (std::size_t i = 0; i < scan.omega.size(); ++i) {
            csv << format_number(pt.mismatch.eps1) << "," << format_number(pt.mismatch.eps2) << ","
                << format_number(rad_to_hz(scan.omega[i])) << ",";
            if (pt.ratio[i]) {
                csv << format_number(*pt.ratio[i]);
            } else {
                csv << "unstable";
                ++gaps;
            }
            csv << "\n";
        }
    }
    if (gaps > 0) err << "note: " << gaps << " row(s) marked unstable\n";
    return exit_ok;
}

inline void write_stability(std::ostream& out, const StabilityReport& r)
{
    if (!r.solver_ok) {
        out << "eigenvalue solver failed\n";
        return;
    }
    out << "eigenvalues of M (rad/s):\n";
    for (const cplx& ev : r.eigenvalues) {
        out << "  " << format_number(ev.real()) << (ev.imag() < 0 ? " - " : " + ") << format_number(std::abs(ev.imag()))
            << "i\n";
    }
    out << "spectral abscissa: " << format_number(r.spectral_abscissa) << " rad/s\n";
    out << "verdict: " << (r.stable() ? "stable" : "unstable") << "\n";
}

inline int cmd_case_study(const RunConfig& cfg, std::ostream& csv, std::ostream& report, std::ostream& err)
{
    const ModelParams& p = cfg.resolved.model;
    const std::vector<double> grid = make_grid(cfg.grid, p.omega_m);
    if (cfg.si && !cfg.resolved.mass_kg) throw Error(ErrorCode::config, "--si needs mass_kg in the config");

    report << "case study: fixed input power, G = " << format_number(rad_to_hz(p.measurement_strength()))
           << " Hz (x 2pi)\n";

    CaseStudyReport r;
    int code = exit_ok;
    try {
        r = case_study(p, grid);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        r.omega = grid;
        r.thermal = p.nbar;
        r.stability = analyze_stability(build_matrices(p));
        r.diagnostics = validate(p);
        const double nan = std::nan("");
        r.quantum.assign(grid.size(), nan);
        r.cqnc_nonideal.assign(grid.size(), nan);
        r.cqnc_ideal.assign(grid.size(), nan);
        code = exit_partial_failure;
    }

    const double thermal = cfg.thermal ? r.thermal : 0.0;
    const bool si = cfg.si;
    const MechanicalParams mech{p.omega_m, p.gamma_m, si ? cfg.resolved.mass_kg.value_or(0.0) : 0.0, 0.0};
    csv << "omega_hz,s_quantum,s_cqnc_nonideal,s_cqnc_ideal,s_thermal";
    if (si) csv << ",s_quantum_si,s_cqnc_nonideal_si,s_cqnc_ideal_si,s_thermal_si";
    csv << "\n";
    for (std::size_t i = 0; i < r.omega.size(); ++i) {
        const double row[4] = {r.quantum[i], r.cqnc_nonideal[i], r.cqnc_ideal[i], thermal};
        csv << format_number(rad_to_hz(r.omega[i]));
        for (double v : row) csv << "," << format_number(v);
        if (si) {
            for (double v : row) csv << "," << format_number(to_si_force_psd(v, mech));
        }
        csv << "\n";
    }

    char line[160];
    std::snprintf(line, sizeof line, "below-resonance band: f <= %s Hz (omega_m / sqrt 2)\n",
                  format_number(rad_to_hz(r.below_band_max)).c_str());
    report << line;
    std::snprintf(line, sizeof line, "nonideal reduction: %.1f %%\n", 100.0 * r.reduction_nonideal_below);
    report << line;
    std::snprintf(line, sizeof line, "ideal reduction: %.1f %% (kappa_a = gamma_m)\n", 100.0 * r.reduction_ideal_below);
    report << line;
    std::snprintf(line, sizeof line, "above-resonance band: f >= %s Hz; max |CQNC / quantum - 1| = %.2f %%\n",
                  format_number(rad_to_hz(r.above_band_min)).c_str(), 100.0 * r.max_deviation_above);
    report << line;
    report << "thermal occupancy (reported separately): " << format_number(r.thermal) << "\n";
    report << "spectral abscissa: " << format_number(r.stability.spectral_abscissa) << " rad/s ("
           << (r.stability.stable() ? "stable" : "unstable") << ")\n";
    for (const Diagnostic& d : cfg.resolved.diagnostics) report << "diagnostic: " << to_string(d.kind) << ": " << d.message << "\n";
    return code;
}

inline int cmd_stability(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    detail::report_diagnostics(cfg.resolved.diagnostics, err);
    write_stability(out, analyze_stability(build_matrices(cfg.resolved.model)));
    return exit_ok;
}

} // namespace cqnc
