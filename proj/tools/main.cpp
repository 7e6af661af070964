#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mechcluster/mechcluster.hpp"

namespace {

using namespace mechcluster;

nlohmann::ordered_json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

int run_simulate(const std::string& path, bool as_json, bool strict) {
    const ConfigMap map = parse_config_file(path);
    bool has_scenario = false;
    for (const auto& [key, value] : map)
        if (key.rfind("scenario.", 0) == 0) has_scenario = true;
    if (!has_scenario) throw ConfigError(path + ": config has no [scenario] section");
    const ScenarioConfig cfg = scenario_from_config(map);
    const ResultRow row = run_point(cfg, strict);
    if (row.status != RowStatus::ok) {
        std::cerr << "error: " << row.error << "\n";
        return row.status == RowStatus::config_error ? 2 : 3;
    }
    if (as_json) {
        nlohmann::ordered_json out;
        out["graph_kind"] = cfg.graph_file.empty() ? cfg.graph_kind : "file:" + cfg.graph_file;
        out["n"] = static_cast<int>(row.nullifier_variance.size());
        out["squeezing"] = cfg.squeezing;
        out["temperature_k"] = cfg.temperature_k;
        out["fidelity"] = json_number(row.fidelity);
        nlohmann::ordered_json vars = nlohmann::ordered_json::array();
        nlohmann::ordered_json dbs = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < row.nullifier_variance.size(); ++j) {
            vars.push_back(json_number(row.nullifier_variance(j)));
            dbs.push_back(json_number(row.nullifier_db(j)));
        }
        out["nullifier_variance"] = vars;
        out["nullifier_db"] = dbs;
        out["null_db_min"] = json_number(row.null_db_min);
        out["null_db_max"] = json_number(row.null_db_max);
        out["xi_star_rad_s"] = json_number(row.xi_star);
        out["coop_min"] = json_number(row.coop_min);
        out["rwa_ratio"] = json_number(row.rwa_ratio);
        out["rwa_pass_first_order"] = row.rwa_pass_first_order;
        out["rwa_pass_full"] = row.rwa_pass_full;
        out["stability_rad_s"] = json_number(row.stability);
        out["physicality"] = json_number(row.physicality);
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    const std::string graph = cfg.graph_file.empty() ? cfg.graph_kind : cfg.graph_file;
    std::printf("graph               : %s, n = %d\n", graph.c_str(),
                static_cast<int>(row.nullifier_variance.size()));
    std::printf("squeezing r         : %g\n", cfg.squeezing);
    std::printf("temperature [K]     : %g\n", cfg.temperature_k);
    std::printf("fidelity            : %.12g\n", row.fidelity);
    std::printf("nullifier variance  :");
    for (Eigen::Index j = 0; j < row.nullifier_variance.size(); ++j)
        std::printf(" %.6g", row.nullifier_variance(j));
    std::printf("\n");
    std::printf("nullifier dB        : min %.4f, max %.4f\n", row.null_db_min, row.null_db_max);
    std::printf("xi_star [rad/s]     : %.6g\n", row.xi_star);
    std::printf("min cooperativity   : %.6g\n", row.coop_min);
    std::printf("rwa ratio           : %.6g (first-order %s, full %s at safety %g)\n",
                row.rwa_ratio, row.rwa_pass_first_order ? "pass" : "FAIL",
                row.rwa_pass_full ? "pass" : "FAIL", cfg.rwa_safety);
    std::printf("stability [rad/s]   : %.6g\n", row.stability);
    std::printf("physicality margin  : %.3e\n", row.physicality);
    return 0;
}

int run_drives(const std::string& path) {
    const ConfigMap map = parse_config_file(path);
    const ScenarioConfig cfg = scenario_from_config(map);
    const Eigen::MatrixXd a = resolve_graph(cfg);
    const SystemParams params = resolve_params(cfg, a);
    const DriveSet drives = synthesize_drives(params, a);
    const int n = params.n;
    std::printf("drive tones (%s frequencies), %d cavities x %d tones\n",
                drives.absolute ? "absolute" : "relative", n, 2 * n);
    std::printf("%4s %4s %6s %22s %16s %12s\n", "k", "m", "tone", "lambda [rad/s]", "|eps| [rad/s]", "arg eps");
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < 2 * n; ++m) {
            const std::complex<double> eps = drives.epsilon(k, m);
            std::printf("%4d %4d %6s %22.12e %16.8e %12.6f\n", k + 1, m % n + 1,
                        m < n ? "red" : "blue", drives.lambda(k, m), std::abs(eps), std::arg(eps));
        }
    return 0;
}

int run_check_rwa(const std::string& path) {
    const ConfigMap map = parse_config_file(path);
    const ScenarioConfig cfg = scenario_from_config(map);
    const Eigen::MatrixXd a = resolve_graph(cfg);
    const SystemParams params = resolve_params(cfg, a);
    const RwaReport report = check_rwa(params, a, cfg.rwa_safety);
    std::printf("scalar ratio    : %.6g\n", report.scalar_ratio);
    std::printf("sideband ratio  : %.6g\n", report.sideband_ratio);
    const char* names[3] = {"direct processes (family 1)",
                            "mediated, difference frequencies (family 2)",
                            "mediated, sum frequencies (family 3)"};
    const std::vector<RwaTriple>* families[3] = {&report.family1, &report.family2, &report.family3};
    for (int f = 0; f < 3; ++f) {
        std::printf("\n%s: worst ratio %.6g\n", names[f], report.worst_family(*families[f]));
        std::printf("%4s %4s %4s %16s %16s %12s\n", "k", "m", "m'", "lhs [rad/s]", "rhs [rad/s]", "ratio");
        for (const auto& t : *families[f])
            std::printf("%4d %4d %4d %16.6e %16.6e %12.4e\n",
                        t.k + 1, t.m + 1, t.mp + 1, t.lhs, t.rhs, t.ratio);
    }
    std::printf("\nfirst-order margin (scalar, sideband, family 1): %s at safety %g\n",
                report.pass_first_order ? "PASS" : "FAIL", report.safety);
    std::printf("full margin (all families): %s at safety %g\n",
                report.pass_full ? "PASS" : "FAIL", report.safety);
    return 0;
}

int run_preset(const std::string& name, bool emit) {
    const SweepSpec spec = make_preset(name);
    if (emit) {
        std::cout << emit_config(spec);
        return 0;
    }
    std::printf("preset %s: axis %s, %zu points in [%g, %g]\n", name.c_str(), to_string(spec.axis),
                spec.grid.size(), spec.grid.front(), spec.grid.back());
    for (const auto& curve : spec.curves)
        std::printf("  curve %-16s %s graph, n = %d\n", curve.label.c_str(),
                    curve.scenario.graph_kind.c_str(), curve.scenario.graph_n);
    std::printf("run with: mechcluster preset %s --emit-config > %s.toml\n", name.c_str(), name.c_str());
    return 0;
}

int run_sweep_cmd(const std::string& path, const std::string& out, int jobs, bool strict) {
    const ConfigMap map = parse_config_file(path);
    const SweepSpec spec = sweep_from_config(map);
    SweepOptions options;
    options.out_path = out;
    options.jobs = jobs;
    options.strict_rwa = strict;
    const SweepOutcome outcome = run_sweep(spec, options);
    for (const auto& file : outcome.files) std::printf("wrote %s\n", file.c_str());
    std::printf("wrote %s\n", outcome.metadata_file.c_str());
    std::printf("%d points, %d failed\n", outcome.points, outcome.failures);
    return outcome.failures > 0 ? 4 : 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"steady-state simulator and drive synthesis for dissipative"
                 " preparation of mechanical cluster states"};
    app.set_version_flag("--version", mechcluster::version_string);
    app.require_subcommand(1);

    std::string config_path, out_path, preset_name;
    int jobs = 1;
    bool as_json = false, strict = false, emit = false;

    auto* simulate = app.add_subcommand("simulate", "evaluate one steady state from a config");
    simulate->add_option("config", config_path, "config file")->required();
    simulate->add_flag("--json", as_json, "print the report as JSON");
    simulate->add_flag("--strict-rwa", strict, "fail when the first-order rwa margin is violated");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV files");
    sweep->add_option("config", config_path, "config file with a [sweep] section")->required();
    sweep->add_option("--out", out_path, "output CSV path (curve labels are suffixed)")->required();
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--strict-rwa", strict, "record rwa-violating points as failures");

    auto* drives = app.add_subcommand("drives", "print the synthesized drive tone table");
    drives->add_option("config", config_path, "config file")->required();

    auto* rwa = app.add_subcommand("check-rwa", "print every rotating-wave validity margin");
    rwa->add_option("config", config_path, "config file")->required();

    auto* preset = app.add_subcommand("preset", "describe or emit a named preset");
    preset->add_option("name", preset_name, "preset name (fig2..fig9)")->required();
    preset->add_flag("--emit-config", emit, "print the preset as a config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(config_path, as_json, strict);
        if (sweep->parsed()) return run_sweep_cmd(config_path, out_path, jobs, strict);
        if (drives->parsed()) return run_drives(config_path);
        if (rwa->parsed()) return run_check_rwa(config_path);
        if (preset->parsed()) return run_preset(preset_name, emit);
    } catch (const mechcluster::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
