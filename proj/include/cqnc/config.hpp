#pragma once

// Flat `key = value` configuration. Frequencies are ordinary (Hz) in the file
// and converted to angular rates once, here.

#include "cqnc/constants.hpp"
#include "cqnc/errors.hpp"
#include "cqnc/params.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cqnc {

inline constexpr std::array<std::string_view, 23> config_keys{
    "omega_m_hz",    "gamma_m_hz",      "kappa_c_hz",      "kappa_a_hz",
    "detuning_hz",   "mass_kg",         "temperature_k",   "cavity_length_m",
    "input_power_w", "reflectivity",    "pump_intensity_w_per_cm2",
    "crystal_length_m", "d_eff_m_per_v", "n1", "n2", "n3",
    "carrier_wavelength_m", "eps1", "eps2",
    "g_hz", "g_bs_hz", "g_dc_hz", "nbar"};

// OPA and carrier values of the case-study design; used when a physical
// block omits them.
namespace case_study_defaults {
inline constexpr double crystal_length_m = 1.06e-2;
inline constexpr double d_eff_m_per_v = 10e-12;
inline constexpr double n1 = 1.83;
inline constexpr double n2 = 1.83;
inline constexpr double n3 = 1.79;
inline constexpr double carrier_wavelength_m = 1064e-9;
} // namespace case_study_defaults

// Micromechanical design point. Detuning is the matched value -omega_m.
inline constexpr std::string_view design_point_config = R"(# micromechanical design point
omega_m_hz = 0.5e6
gamma_m_hz = 5e3
kappa_c_hz = 1e6
kappa_a_hz = 0.2e6
detuning_hz = -0.5e6
mass_kg = 1e-12
temperature_k = 300
cavity_length_m = 1.5
input_power_w = 0.1
reflectivity = 0.005
pump_intensity_w_per_cm2 = 45
crystal_length_m = 1.06e-2
d_eff_m_per_v = 10e-12
n1 = 1.83
n2 = 1.83
n3 = 1.79
carrier_wavelength_m = 1064e-9
g_hz = 300e3
g_bs_hz = 150e3
g_dc_hz = 150e3
)";

struct ConfigEntry {
    double value = 0.0;
    int line = 0;
};

struct ConfigText {
    std::string source;
    std::map<std::string, ConfigEntry, std::less<>> entries;

    bool has(std::string_view key) const { return entries.find(key) != entries.end(); }

    std::optional<double> get(std::string_view key) const
    {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        return it->second.value;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] inline void config_error(const std::string& source, int line, const std::string& message)
{
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": " << message;
    throw Error(ErrorCode::config, os.str());
}

} // namespace detail

inline ConfigText parse_config(std::string_view text, std::string source)
{
    ConfigText cfg;
    cfg.source = std::move(source);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) detail::config_error(cfg.source, line_no, "expected `key = value`");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (std::find(config_keys.begin(), config_keys.end(), key) == config_keys.end()) {
            detail::config_error(cfg.source, line_no, "unknown key `" + key + "`");
        }
        if (cfg.has(key)) detail::config_error(cfg.source, line_no, "duplicate key `" + key + "`");

        errno = 0;
        char* parse_end = nullptr;
        const double v = std::strtod(value.c_str(), &parse_end);
        if (value.empty() || parse_end != value.c_str() + value.size() || errno == ERANGE || !std::isfinite(v)) {
            detail::config_error(cfg.source, line_no, "invalid number `" + value + "` for `" + key + "`");
        }
        cfg.entries.emplace(key, ConfigEntry{v, line_no});
    }
    return cfg;
}

inline ConfigText load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) detail::config_error(path, 0, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

/// Entries of `over` replace those of `base`.
inline ConfigText merge(ConfigText base, const ConfigText& over)
{
    for (const auto& [key, entry] : over.entries) base.entries.insert_or_assign(key, entry);
    base.source = over.source;
    return base;
}

struct ResolvedModel {
    ModelParams model;
    std::optional<double> mass_kg;
    std::optional<MismatchSpec> mismatch;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline double required(const ConfigText& cfg, std::string_view key)
{
    const auto v = cfg.get(key);
    if (!v) config_error(cfg.source, 0, "missing required key `" + std::string(key) + "`");
    return *v;
}

inline double value_or(const ConfigText& cfg, std::string_view key, double fallback)
{
    return cfg.get(key).value_or(fallback);
}

inline constexpr std::array<std::string_view, 5> physical_block{
    "mass_kg", "cavity_length_m", "input_power_w", "reflectivity", "pump_intensity_w_per_cm2"};

} // namespace detail

/// Builds the reduced model. Couplings come from the physical block unless
/// g_hz / g_bs_hz / g_dc_hz override them; eps1 / eps2 then redistribute
/// g_bs, g_dc around the final g.
inline ResolvedModel resolve_model(const ConfigText& cfg)
{
    ResolvedModel r;
    ModelParams& p = r.model;
    p.omega_m = hz_to_rad(detail::required(cfg, "omega_m_hz"));
    p.gamma_m = hz_to_rad(detail::required(cfg, "gamma_m_hz"));
    p.kappa_c = hz_to_rad(detail::required(cfg, "kappa_c_hz"));
    p.kappa_a = hz_to_rad(detail::required(cfg, "kappa_a_hz"));
    p.detuning = hz_to_rad(detail::required(cfg, "detuning_hz"));
    r.mass_kg = cfg.get("mass_kg");

    const bool physical = std::all_of(detail::physical_block.begin(), detail::physical_block.end(),
                                      [&](std::string_view k) { return cfg.has(k); });
    const bool direct = cfg.has("g_hz") && cfg.has("g_bs_hz") && cfg.has("g_dc_hz");
    if (!physical && !direct) {
        detail::config_error(cfg.source, 0,
                             "need either the physical block (mass_kg, cavity_length_m, input_power_w, "
                             "reflectivity, pump_intensity_w_per_cm2) or g_hz, g_bs_hz, g_dc_hz");
    }

    try {
        if (physical) {
            MechanicalParams mech{p.omega_m, p.gamma_m, *cfg.get("mass_kg"), detail::value_or(cfg, "temperature_k", 0.0)};
            const double wavelength =
                detail::value_or(cfg, "carrier_wavelength_m", case_study_defaults::carrier_wavelength_m);
            if (!(wavelength > 0.0)) detail::config_error(cfg.source, 0, "carrier_wavelength_m must be > 0");
            const double omega_c = two_pi * PhysicalConstants::c_light / wavelength;
            OpticalSetup opt{*cfg.get("cavity_length_m"), p.kappa_c, p.kappa_a, p.detuning, omega_c,
                             *cfg.get("input_power_w"), *cfg.get("reflectivity")};
            OpaParams opa{detail::value_or(cfg, "crystal_length_m", case_study_defaults::crystal_length_m),
                          *cfg.get("pump_intensity_w_per_cm2") * 1e4,
                          detail::value_or(cfg, "d_eff_m_per_v", case_study_defaults::d_eff_m_per_v),
                          detail::value_or(cfg, "n1", case_study_defaults::n1),
                          detail::value_or(cfg, "n2", case_study_defaults::n2),
                          detail::value_or(cfg, "n3", case_study_defaults::n3),
                          omega_c,
                          omega_c};
            p = derive_model(mech, opt, opa);
        } else if (cfg.has("temperature_k")) {
            p.nbar = thermal_occupancy(*cfg.get("temperature_k"), p.omega_m);
        }

        if (auto v = cfg.get("g_hz")) p.g = hz_to_rad(*v);
        if (auto v = cfg.get("g_bs_hz")) p.g_bs = hz_to_rad(*v);
        if (auto v = cfg.get("g_dc_hz")) p.g_dc = hz_to_rad(*v);
        if (auto v = cfg.get("nbar")) p.nbar = *v;

        if (cfg.has("eps1") || cfg.has("eps2")) {
            const MismatchSpec spec{detail::value_or(cfg, "eps1", 0.0), detail::value_or(cfg, "eps2", 0.0)};
            std::tie(p.g_bs, p.g_dc) = apply_mismatch(p.g, spec);
            r.mismatch = spec;
            const auto extra = check_mismatch(spec);
            r.diagnostics.insert(r.diagnostics.end(), extra.begin(), extra.end());
        }
        check(p);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config) throw;
        detail::config_error(cfg.source, 0, e.what());
    }

    const auto advisory = validate(p);
    r.diagnostics.insert(r.diagnostics.end(), advisory.begin(), advisory.end());
    return r;
}

} // namespace cqnc
