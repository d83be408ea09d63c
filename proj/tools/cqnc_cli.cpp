// cqnc: force-noise spectra, mismatch scans, case study and stability reports.

#include "cqnc/cqnc.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string route = "all";
    std::optional<double> omega_min_hz;
    std::optional<double> omega_max_hz;
    std::size_t points = 400;
    bool linear = false;
    std::vector<double> eps1_list{0.0};
    std::vector<double> eps2_list{0.0};
    bool no_thermal = false;
    bool si = false;
    std::string track_couplings = "on";
};

void add_common(CLI::App* cmd, CliOptions& o, bool config_required)
{
    auto* cfg = cmd->add_option("--config", o.config_path, "Flat key = value config file");
    if (config_required) cfg->required();
    cmd->add_option("--out", o.out_path, "Output CSV path (default: stdout)");
    cmd->add_option("--omega-min-hz", o.omega_min_hz, "Grid minimum in Hz (default f_m / 100)");
    cmd->add_option("--omega-max-hz", o.omega_max_hz, "Grid maximum in Hz (default 100 f_m)");
    cmd->add_option("--points", o.points, "Number of grid points")->check(CLI::PositiveNumber);
    cmd->add_flag("--linear", o.linear, "Linear instead of logarithmic grid spacing");
    cmd->add_flag("--no-thermal", o.no_thermal, "Drop the thermal term from reported spectra");
    cmd->add_flag("--si", o.si, "Append N^2/Hz columns (needs mass_kg)");
    cmd->add_option("--track-couplings", o.track_couplings, "Re-apply the mismatch relation when g is varied")
        ->check(CLI::IsMember({"on", "off"}));
}

cqnc::RunConfig build_run_config(const CliOptions& o, bool case_study_defaults)
{
    cqnc::ConfigText text;
    if (case_study_defaults) text = cqnc::parse_config(cqnc::design_point_config, "<case-study defaults>");
    if (!o.config_path.empty()) {
        cqnc::ConfigText user = cqnc::load_config(o.config_path);
        text = case_study_defaults ? cqnc::merge(std::move(text), user) : std::move(user);
    }

    cqnc::RunConfig cfg;
    cfg.resolved = cqnc::resolve_model(text);
    cfg.grid.min_hz = o.omega_min_hz;
    cfg.grid.max_hz = o.omega_max_hz;
    cfg.grid.points = o.points;
    cfg.grid.log_spaced = !o.linear;
    cfg.route = cqnc::parse_route(o.route);
    cfg.eps1_list = o.eps1_list;
    cfg.eps2_list = o.eps2_list;
    cfg.thermal = !o.no_thermal;
    cfg.si = o.si;
    cfg.track_couplings = o.track_couplings == "on";
    return cfg;
}

template <typename Command>
int run_with_output(const CliOptions& o, Command&& command)
{
    if (o.out_path.empty()) return command(std::cout);
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: " << o.out_path << ": cannot open for writing\n";
        return cqnc::exit_config_error;
    }
    const int code = command(out);
    out.flush();
    if (!out) {
        std::cerr << "error: " << o.out_path << ": write failed\n";
        return cqnc::exit_config_error;
    }
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optomechanical force-noise budgets with coherent quantum noise cancellation"};
    app.require_subcommand(1);

    CliOptions o;
    auto* spectrum = app.add_subcommand("spectrum", "Optimized force-noise spectra per route");
    add_common(spectrum, o, true);
    spectrum->add_option("--route", o.route, "standard|cqnc-ideal|cqnc-nonideal|numeric|all")
        ->check(CLI::IsMember({"standard", "cqnc-ideal", "cqnc-nonideal", "numeric", "all"}));

    auto* scan = app.add_subcommand("scan", "Coupling-mismatch scan of S_F / S_SQL");
    add_common(scan, o, true);
    scan->add_option("--eps1-list", o.eps1_list, "Comma-separated eps1 values")->delimiter(',');
    scan->add_option("--eps2-list", o.eps2_list, "Comma-separated eps2 values")->delimiter(',');

    auto* case_study = app.add_subcommand("case-study", "Fixed-power spectra for the design point");
    add_common(case_study, o, false);

    auto* stability = app.add_subcommand("stability", "Eigenvalues of the drift matrix");
    add_common(stability, o, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) {
            const auto cfg = build_run_config(o, false);
            return run_with_output(o, [&](std::ostream& out) { return cqnc::cmd_spectrum(cfg, out, std::cerr); });
        }
        if (scan->parsed()) {
            const auto cfg = build_run_config(o, false);
            return run_with_output(o, [&](std::ostream& out) { return cqnc::cmd_scan(cfg, out, std::cerr); });
        }
        if (case_study->parsed()) {
            const auto cfg = build_run_config(o, true);
            std::ostream& report = o.out_path.empty() ? std::cerr : std::cout;
            return run_with_output(o, [&](std::ostream& out) { return cqnc::cmd_case_study(cfg, out, report, std::cerr); });
        }
        if (stability->parsed()) {
            const auto cfg = build_run_config(o, false);
            return run_with_output(o, [&](std::ostream& out) { return cqnc::cmd_stability(cfg, out, std::cerr); });
        }
    } catch (const cqnc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == cqnc::ErrorCode::config ? cqnc::exit_config_error : cqnc::exit_partial_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cqnc::exit_partial_failure;
    }
    return cqnc::exit_ok;
}
