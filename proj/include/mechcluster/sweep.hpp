#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mechcluster/config.hpp"
#include "mechcluster/errors.hpp"
#include "mechcluster/steady_state.hpp"
#include "mechcluster/version.hpp"

namespace mechcluster {

enum class SweepAxis { gamma, temperature, modes, squeezing, gtilde };

inline const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::gamma: return "gamma";
        case SweepAxis::temperature: return "temperature";
        case SweepAxis::modes: return "n";
        case SweepAxis::squeezing: return "r";
        case SweepAxis::gtilde: return "gtilde";
    }
    throw DomainError("unknown sweep axis");
}

inline SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "gamma") return SweepAxis::gamma;
    if (name == "temperature") return SweepAxis::temperature;
    if (name == "n") return SweepAxis::modes;
    if (name == "r") return SweepAxis::squeezing;
    if (name == "gtilde") return SweepAxis::gtilde;
    throw ConfigError("unknown sweep axis '" + name + "' (expected gamma, temperature, n, r, or gtilde)");
}

/// Axis units: gamma and gtilde are ratios to kappa, temperature is in
/// Kelvin, n a mode count, r the squeezing parameter.
inline void apply_axis(ScenarioConfig& cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::gamma:
            cfg.gamma_hz.clear();
            cfg.gamma_over_kappa = value;
            return;
        case SweepAxis::temperature:
            cfg.temperature_k = value;
            return;
        case SweepAxis::modes: {
            const double rounded = std::round(value);
            if (std::abs(value - rounded) > 1e-9 || rounded < 1.0)
                throw ConfigError("mode-count axis requires positive integers, got "
                                  + std::to_string(value));
            cfg.graph_n = static_cast<int>(rounded);
            return;
        }
        case SweepAxis::squeezing:
            cfg.squeezing = value;
            return;
        case SweepAxis::gtilde:
            cfg.gtilde_hz.clear();
            cfg.gtilde_over_kappa = value;
            return;
    }
    throw DomainError("unknown sweep axis");
}

struct SweepCurve {
    std::string label;  ///< empty for an unlabeled single curve
    ScenarioConfig scenario;
};

struct SweepSpec {
    SweepAxis axis = SweepAxis::gamma;
    std::vector<double> grid;
    std::vector<SweepCurve> curves;
};

namespace detail {

inline std::vector<double> build_grid(double lo, double hi, int points, bool log_scale, int line) {
    if (points < 2) throw ConfigError("line " + std::to_string(line) + ": sweep needs points >= 2");
    if (!(lo < hi)) throw ConfigError("line " + std::to_string(line) + ": sweep needs min < max");
    if (log_scale && !(lo > 0.0))
        throw ConfigError("line " + std::to_string(line) + ": log-scale sweep needs min > 0");
    std::vector<double> grid(points);
    const double a = log_scale ? std::log10(lo) : lo;
    const double b = log_scale ? std::log10(hi) : hi;
    for (int i = 0; i < points; ++i) {
        const double t = a + (b - a) * (static_cast<double>(i) / (points - 1));
        grid[i] = log_scale ? std::pow(10.0, t) : t;
    }
    return grid;
}

}

/// Builds the sweep description from a parsed config: [sweep] defines the
/// axis and grid, [scenario] the base point, and optional [curve.<label>]
/// sections define variants on top of the base.
inline SweepSpec sweep_from_config(const ConfigMap& map) {
    SweepSpec spec;
    const auto axis_it = map.find("sweep.axis");
    if (axis_it == map.end()) throw ConfigError("config has no [sweep] section with an axis key");
    spec.axis = sweep_axis_from_string(detail::require_string(axis_it->second, "axis"));

    bool log_scale = spec.axis == SweepAxis::gamma || spec.axis == SweepAxis::gtilde;
    double lo = 0.0, hi = 0.0;
    int points = 0, range_line = axis_it->second.line;
    bool has_range = false;
    for (const auto& [key, value] : map) {
        if (key.rfind("sweep.", 0) != 0) continue;
        const std::string name = key.substr(6);
        if (name == "axis") continue;
        else if (name == "values") {
            if (value.kind != ConfigValue::Kind::number_list)
                throw ConfigError("line " + std::to_string(value.line)
                                  + ": sweep values must be an array of numbers");
            spec.grid = value.numbers;
        } else if (name == "min") { lo = detail::require_number(value, name); has_range = true; range_line = value.line; }
        else if (name == "max") { hi = detail::require_number(value, name); has_range = true; }
        else if (name == "points") { points = detail::require_integer(value, name); has_range = true; }
        else if (name == "scale") {
            const std::string scale = detail::require_string(value, name);
            if (scale == "log") log_scale = true;
            else if (scale == "linear") log_scale = false;
            else throw ConfigError("line " + std::to_string(value.line)
                                   + ": sweep scale must be \"log\" or \"linear\"");
        } else {
            throw ConfigError("line " + std::to_string(value.line) + ": unknown sweep key '" + name + "'");
        }
    }
    if (spec.grid.empty()) {
        if (!has_range) throw ConfigError("sweep needs either values or min/max/points");
        spec.grid = detail::build_grid(lo, hi, points, log_scale, range_line);
    }
    if (spec.grid.empty()) throw ConfigError("sweep grid is empty");

    const ScenarioConfig base = scenario_from_config(map, "scenario");
    std::vector<std::string> labels;
    for (const auto& [key, value] : map) {
        if (key.rfind("curve.", 0) != 0) continue;
        const auto dot = key.find('.', 6);
        if (dot == std::string::npos)
            throw ConfigError("line " + std::to_string(value.line) + ": malformed curve key '" + key + "'");
        const std::string label = key.substr(6, dot - 6);
        if (labels.empty() || labels.back() != label) labels.push_back(label);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.empty()) {
        spec.curves.push_back({"", base});
    } else {
        for (const auto& label : labels)
            spec.curves.push_back({label, scenario_from_config(map, "curve." + label, base)});
    }
    if (spec.axis == SweepAxis::modes)
        for (const auto& curve : spec.curves)
            if (!curve.scenario.graph_file.empty())
                throw ConfigError("mode-count sweeps require generated graphs, but curve '"
                                  + curve.label + "' uses graph_file");
    return spec;
}

enum class RowStatus { ok, config_error, physics_error };

/// Metrics of one sweep point; numeric fields are meaningful only when
/// status == ok.
struct ResultRow {
    std::string axis_name;
    double axis_value = std::numeric_limits<double>::quiet_NaN();
    RowStatus status = RowStatus::ok;
    std::string error;

    double fidelity = 0.0;
    Eigen::VectorXd nullifier_variance;
    Eigen::VectorXd nullifier_db;
    double null_db_min = 0.0;
    double null_db_max = 0.0;
    double xi_star = 0.0;
    double coop_min = 0.0;
    double rwa_ratio = 0.0;        ///< worst first-order validity ratio
    bool rwa_pass_first_order = false;
    bool rwa_pass_full = false;
    double stability = 0.0;
    double physicality = 0.0;      ///< min eig(V + i Omega) of the mechanical covariance
};

/// Evaluates one scenario end to end. Failures are captured in the row
/// status instead of escaping, so sweeps can continue past bad points.
inline ResultRow run_point(const ScenarioConfig& cfg, bool strict_rwa = false) {
    ResultRow row;
    try {
        const Eigen::MatrixXd a = resolve_graph(cfg);
        const SystemParams params = resolve_params(cfg, a);
        const RwaReport rwa = check_rwa(params, a, cfg.rwa_safety);
        row.rwa_ratio = rwa.first_order_ratio();
        row.rwa_pass_first_order = rwa.pass_first_order;
        row.rwa_pass_full = rwa.pass_full;
        if (strict_rwa && !rwa.pass_first_order)
            throw StabilityError("rwa margin violated: first-order ratio "
                                 + std::to_string(row.rwa_ratio) + " exceeds 1/safety = "
                                 + std::to_string(1.0 / rwa.safety));
        const SteadyStateResult steady = solve_steady(params, a);
        const EffectiveNoise noise = effective_noise(params, a);
        row.fidelity = steady.fidelity;
        row.nullifier_variance = steady.nullifier_variance;
        row.nullifier_db = steady.nullifier_db;
        row.null_db_min = steady.nullifier_db.minCoeff();
        row.null_db_max = steady.nullifier_db.maxCoeff();
        row.xi_star = noise.xi_star;
        row.coop_min = noise.cooperativity.minCoeff();
        row.stability = steady.stability;
        row.physicality = physicality_margin(steady.v_mechanical);
    } catch (const std::invalid_argument& e) {
        row.status = RowStatus::config_error;
        row.error = e.what();
    } catch (const ConfigError& e) {
        row.status = RowStatus::config_error;
        row.error = e.what();
    } catch (const std::exception& e) {
        row.status = RowStatus::physics_error;
        row.error = e.what();
    }
    return row;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Error messages embedded in CSV must not break the row structure.
inline std::string sanitize_csv(std::string s) {
    for (char& ch : s) {
        if (ch == ',') ch = ';';
        if (ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
    }
    return s;
}

inline std::string curve_file_name(const std::string& out_path, const std::string& label) {
    if (label.empty()) return out_path;
    const std::filesystem::path path(out_path);
    std::filesystem::path named = path.parent_path();
    named /= path.stem().string() + "_" + label + path.extension().string();
    return named.string();
}

inline void write_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out.flush()) throw ConfigError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ConfigError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

/// Renders one curve's rows with the fixed column schema, padding the
/// per-mode nullifier columns to the widest row.
inline std::string render_csv(const std::vector<ResultRow>& rows) {
    int max_n = 0;
    for (const auto& row : rows)
        max_n = std::max(max_n, static_cast<int>(row.nullifier_variance.size()));
    std::string text = "axis_name,axis_value,fidelity";
    for (int j = 1; j <= max_n; ++j) text += ",null_var_" + std::to_string(j);
    text += ",null_db_min,null_db_max,xi_star,coop_min,rwa_ratio,stability,error\n";
    for (const auto& row : rows) {
        text += row.axis_name + "," + format_double(row.axis_value);
        if (row.status == RowStatus::ok) {
            text += "," + format_double(row.fidelity);
            for (int j = 0; j < max_n; ++j)
                text += j < row.nullifier_variance.size()
                    ? "," + format_double(row.nullifier_variance(j)) : ",";
            text += "," + format_double(row.null_db_min);
            text += "," + format_double(row.null_db_max);
            text += "," + format_double(row.xi_star);
            text += "," + format_double(row.coop_min);
            text += "," + format_double(row.rwa_ratio);
            text += "," + format_double(row.stability);
            text += ",";
        } else {
            for (int j = 0; j < max_n + 6; ++j) text += ",";
            text += ",," + sanitize_csv(row.error);
        }
        text += "\n";
    }
    return text;
}

}

struct SweepOptions {
    std::string out_path;
    int jobs = 1;
    bool strict_rwa = false;
};

struct SweepOutcome {
    std::vector<std::string> files;  ///< CSV files written, one per curve
    std::string metadata_file;
    int points = 0;
    int failures = 0;
};

/// Runs every curve over the shared grid and writes one CSV per curve
/// plus a deterministic JSON sidecar. Point evaluation is spread over
/// options.jobs threads; output is independent of the thread count.
inline SweepOutcome run_sweep(const SweepSpec& spec, const SweepOptions& options) {
    if (spec.curves.empty()) throw ConfigError("sweep has no curves");
    if (spec.grid.empty()) throw ConfigError("sweep grid is empty");
    if (options.out_path.empty()) throw ConfigError("sweep needs an output path");
    if (options.jobs < 1) throw ConfigError("jobs must be >= 1");
    for (const auto& curve : spec.curves)
        for (const auto& other : spec.curves)
            if (&curve != &other && detail::curve_file_name(options.out_path, curve.label)
                                    == detail::curve_file_name(options.out_path, other.label))
                throw ConfigError("curve labels collide in output file names");

    const int curves = static_cast<int>(spec.curves.size());
    const int points = static_cast<int>(spec.grid.size());
    std::vector<std::vector<ResultRow>> rows(curves, std::vector<ResultRow>(points));

    std::atomic<int> next{0};
    const int total = curves * points;
    auto worker = [&] {
        for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
            const int ci = task / points;
            const int pi = task % points;
            ScenarioConfig cfg = spec.curves[ci].scenario;
            ResultRow row;
            try {
                apply_axis(cfg, spec.axis, spec.grid[pi]);
                row = run_point(cfg, options.strict_rwa);
            } catch (const std::exception& e) {
                row.status = RowStatus::config_error;
                row.error = e.what();
            }
            row.axis_name = to_string(spec.axis);
            row.axis_value = spec.grid[pi];
            rows[ci][pi] = std::move(row);
        }
    };
    const int thread_count = std::min(options.jobs, total);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepOutcome outcome;
    outcome.points = total;
    nlohmann::ordered_json meta;
    meta["tool"] = "mechcluster";
    meta["version"] = version_string;
    meta["axis"] = to_string(spec.axis);
    meta["grid"] = spec.grid;
    meta["strict_rwa"] = options.strict_rwa;
    meta["curves"] = nlohmann::ordered_json::array();

    for (int ci = 0; ci < curves; ++ci) {
        const auto& curve = spec.curves[ci];
        const std::string file = detail::curve_file_name(options.out_path, curve.label);
        detail::write_atomically(file, detail::render_csv(rows[ci]));
        outcome.files.push_back(file);
        int failures = 0;
        for (const auto& row : rows[ci])
            if (row.status != RowStatus::ok) ++failures;
        outcome.failures += failures;

        nlohmann::ordered_json entry;
        entry["label"] = curve.label;
        entry["file"] = file;
        entry["points"] = points;
        entry["failures"] = failures;
        try {
            const Eigen::MatrixXd a = resolve_graph(curve.scenario);
            const SystemParams params = resolve_params(curve.scenario, a);
            entry["n"] = params.n;
            entry["squeezing"] = params.squeezing;
            entry["temperature_k"] = params.temperature;
            entry["kappa_rad_s"] = params.kappa(0);
            entry["gtilde_rad_s"] = params.g_tilde(0);
            if (spec.axis == SweepAxis::gamma)
                entry["gamma_star_over_kappa"] = gamma_star_uniform(params) / params.kappa(0);
        } catch (const std::exception& e) {
            entry["resolve_error"] = std::string(e.what());
        }
        meta["curves"].push_back(entry);
    }
    outcome.metadata_file = options.out_path + ".meta.json";
    detail::write_atomically(outcome.metadata_file, meta.dump(2) + "\n");
    return outcome;
}

namespace detail {

inline void emit_scenario_keys(std::string& text, const ScenarioConfig& cfg) {
    text += "graph_kind = \"" + cfg.graph_kind + "\"\n";
    text += "graph_n = " + std::to_string(cfg.graph_n) + "\n";
    if (!cfg.graph_file.empty()) text += "graph_file = \"" + cfg.graph_file + "\"\n";
    text += "squeezing = " + format_double(cfg.squeezing) + "\n";
    text += "temperature_k = " + format_double(cfg.temperature_k) + "\n";
    text += "omega_base_hz = " + format_double(cfg.omega_base_hz) + "\n";
    auto emit_list = [&](const char* key, const std::vector<double>& values) {
        if (values.empty()) return;
        text += std::string(key) + " = [";
        for (size_t i = 0; i < values.size(); ++i)
            text += (i ? ", " : "") + format_double(values[i]);
        text += "]\n";
    };
    emit_list("omega_mech_hz", cfg.omega_mech_hz);
    text += "kappa_over_omega_base = " + format_double(cfg.kappa_over_omega_base) + "\n";
    emit_list("kappa_hz", cfg.kappa_hz);
    text += "gamma_over_kappa = " + format_double(cfg.gamma_over_kappa) + "\n";
    emit_list("gamma_hz", cfg.gamma_hz);
    text += "gtilde_over_kappa = " + format_double(cfg.gtilde_over_kappa) + "\n";
    emit_list("gtilde_hz", cfg.gtilde_hz);
    emit_list("delta_hz", cfg.delta_hz);
    emit_list("omega_cav_hz", cfg.omega_cav_hz);
    if (!cfg.g_single_file.empty()) text += "g_single_file = \"" + cfg.g_single_file + "\"\n";
    if (cfg.g_single_uniform != 0.0)
        text += "g_single_uniform = " + format_double(cfg.g_single_uniform) + "\n";
    text += "rwa_safety = " + format_double(cfg.rwa_safety) + "\n";
}

}

/// Serializes a sweep back into the config format, with every scenario
/// key written out. Parsing the result reproduces the sweep exactly.
inline std::string emit_config(const SweepSpec& spec) {
    if (spec.curves.empty()) throw ConfigError("emit_config: sweep has no curves");
    std::string text = "[scenario]\n";
    detail::emit_scenario_keys(text, spec.curves.front().scenario);
    text += "\n[sweep]\n";
    text += std::string("axis = \"") + to_string(spec.axis) + "\"\n";
    text += "values = [";
    for (size_t i = 0; i < spec.grid.size(); ++i)
        text += (i ? ", " : "") + detail::format_double(spec.grid[i]);
    text += "]\n";
    for (const auto& curve : spec.curves) {
        if (curve.label.empty()) {
            if (spec.curves.size() > 1)
                throw ConfigError("emit_config: multi-curve sweeps need labeled curves");
            continue;
        }
        text += "\n[curve." + curve.label + "]\n";
        detail::emit_scenario_keys(text, curve.scenario);
    }
    return text;
}

}
