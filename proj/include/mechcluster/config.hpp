#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mechcluster/constants.hpp"
#include "mechcluster/errors.hpp"
#include "mechcluster/graphs.hpp"
#include "mechcluster/model.hpp"

namespace mechcluster {

/// One parsed configuration value. Frequencies carry the _hz key suffix
/// and are converted to angular units during resolution, not here.
struct ConfigValue {
    enum class Kind { number, boolean, string, number_list, string_list };
    Kind kind = Kind::number;
    double number = 0.0;
    bool boolean = false;
    std::string text;
    std::vector<double> numbers;
    std::vector<std::string> texts;
    int line = 0;
};

/// Flat key-value view of a config file, keys qualified as
/// "section.key" (or "curve.<label>.key").
using ConfigMap = std::map<std::string, ConfigValue>;

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline double parse_number(const std::string& token, int line) {
    const std::string t = trim(token);
    if (t.empty()) throw ConfigError("line " + std::to_string(line) + ": expected a number");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ConfigError("line " + std::to_string(line) + ": malformed number '" + t + "'");
    if (!std::isfinite(v))
        throw ConfigError("line " + std::to_string(line) + ": non-finite number '" + t + "'");
    return v;
}

inline ConfigValue parse_value(const std::string& raw, int line) {
    ConfigValue value;
    value.line = line;
    const std::string t = trim(raw);
    if (t.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw ConfigError("line " + std::to_string(line) + ": unterminated string");
        value.kind = ConfigValue::Kind::string;
        value.text = t.substr(1, t.size() - 2);
        if (value.text.find('"') != std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": embedded quote in string");
        return value;
    }
    if (t == "true" || t == "false") {
        value.kind = ConfigValue::Kind::boolean;
        value.boolean = t == "true";
        return value;
    }
    if (t.front() == '[') {
        if (t.back() != ']')
            throw ConfigError("line " + std::to_string(line) + ": unterminated array");
        std::string body = t.substr(1, t.size() - 2);
        std::vector<std::string> items;
        std::string current;
        bool quoted = false;
        for (char ch : body) {
            if (ch == '"') quoted = !quoted;
            if (ch == ',' && !quoted) {
                items.push_back(current);
                current.clear();
            } else {
                current += ch;
            }
        }
        if (!trim(current).empty()) items.push_back(current);
        if (quoted) throw ConfigError("line " + std::to_string(line) + ": unterminated string in array");
        bool strings = false;
        for (const auto& item : items)
            if (!trim(item).empty() && trim(item).front() == '"') strings = true;
        if (strings) {
            value.kind = ConfigValue::Kind::string_list;
            for (const auto& item : items) {
                const ConfigValue element = parse_value(item, line);
                if (element.kind != ConfigValue::Kind::string)
                    throw ConfigError("line " + std::to_string(line) + ": mixed array element types");
                value.texts.push_back(element.text);
            }
        } else {
            value.kind = ConfigValue::Kind::number_list;
            for (const auto& item : items) value.numbers.push_back(parse_number(item, line));
        }
        return value;
    }
    value.kind = ConfigValue::Kind::number;
    value.number = parse_number(t, line);
    return value;
}

inline bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    return true;
}

}

/// Parses the TOML-style config format: [section] headers, key = value
/// lines, # comments. Values are numbers, booleans, quoted strings, or
/// single-line homogeneous arrays.
inline ConfigMap parse_config(std::istream& in) {
    ConfigMap map;
    std::string section;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string text = detail::trim(detail::strip_comment(line));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError("line " + std::to_string(number) + ": unterminated section header");
            section = detail::trim(text.substr(1, text.size() - 2));
            std::string head = section, tail;
            if (const auto dot = section.find('.'); dot != std::string::npos) {
                head = section.substr(0, dot);
                tail = section.substr(dot + 1);
            }
            if (head != "scenario" && head != "sweep" && head != "curve")
                throw ConfigError("line " + std::to_string(number) + ": unknown section ["
                                  + section + "] (expected scenario, sweep, or curve.<label>)");
            if ((head == "curve") != !tail.empty() || (head == "curve" && !detail::valid_identifier(tail)))
                throw ConfigError("line " + std::to_string(number) + ": malformed section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        const std::string key = detail::trim(text.substr(0, eq));
        if (!detail::valid_identifier(key))
            throw ConfigError("line " + std::to_string(number) + ": malformed key '" + key + "'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(number) + ": key '" + key
                              + "' appears before any section header");
        const std::string qualified = section + "." + key;
        if (map.count(qualified))
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + qualified + "'");
        map[qualified] = detail::parse_value(text.substr(eq + 1), number);
    }
    return map;
}

inline ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// One steady-state scenario before unit resolution. Frequencies are in
/// ordinary Hz (converted to angular units by resolve_params), rates
/// without the _hz suffix are dimensionless ratios.
struct ScenarioConfig {
    std::string graph_kind = "linear";
    int graph_n = 4;
    std::string graph_file;  ///< adjacency file path, overrides kind and n

    double squeezing = 2.0;
    double temperature_k = 0.010;
    /// Base of the default frequency ladder Omega_j = j * 2pi * base.
    double omega_base_hz = 1.0e7;
    std::vector<double> omega_mech_hz;  ///< explicit frequencies, override the ladder

    double kappa_over_omega_base = 0.02;
    std::vector<double> kappa_hz;  ///< scalar or per-mode override
    double gamma_over_kappa = 5.0e-6;
    std::vector<double> gamma_hz;
    double gtilde_over_kappa = 0.16;
    std::vector<double> gtilde_hz;

    std::vector<double> delta_hz;
    std::vector<double> omega_cav_hz;
    std::string g_single_file;
    double g_single_uniform = 0.0;  ///< > 0 fills g_single with this value

    double rwa_safety = 5.0;
};

namespace detail {

inline const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> keys = {
        "graph_kind", "graph_n", "graph_file", "squeezing", "temperature_k", "omega_base_hz",
        "omega_mech_hz", "kappa_over_omega_base", "kappa_hz", "gamma_over_kappa", "gamma_hz",
        "gtilde_over_kappa", "gtilde_hz", "delta_hz", "omega_cav_hz", "g_single_file",
        "g_single_uniform", "rwa_safety"};
    return keys;
}

inline double require_number(const ConfigValue& value, const std::string& key) {
    if (value.kind != ConfigValue::Kind::number)
        throw ConfigError("line " + std::to_string(value.line) + ": key '" + key + "' must be a number");
    return value.number;
}

inline std::string require_string(const ConfigValue& value, const std::string& key) {
    if (value.kind != ConfigValue::Kind::string)
        throw ConfigError("line " + std::to_string(value.line) + ": key '" + key + "' must be a string");
    return value.text;
}

inline std::vector<double> require_number_or_list(const ConfigValue& value, const std::string& key) {
    if (value.kind == ConfigValue::Kind::number) return {value.number};
    if (value.kind == ConfigValue::Kind::number_list) return value.numbers;
    throw ConfigError("line " + std::to_string(value.line) + ": key '" + key
                      + "' must be a number or an array of numbers");
}

inline int require_integer(const ConfigValue& value, const std::string& key) {
    const double v = require_number(value, key);
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-9 || std::abs(v) > 1e9)
        throw ConfigError("line " + std::to_string(value.line) + ": key '" + key
                          + "' must be an integer, got " + std::to_string(v));
    return static_cast<int>(rounded);
}

/// Applies one qualified scenario key to cfg.
inline void apply_scenario_key(ScenarioConfig& cfg, const std::string& key, const ConfigValue& value) {
    if (key == "graph_kind") cfg.graph_kind = require_string(value, key);
    else if (key == "graph_n") cfg.graph_n = require_integer(value, key);
    else if (key == "graph_file") cfg.graph_file = require_string(value, key);
    else if (key == "squeezing") cfg.squeezing = require_number(value, key);
    else if (key == "temperature_k") cfg.temperature_k = require_number(value, key);
    else if (key == "omega_base_hz") cfg.omega_base_hz = require_number(value, key);
    else if (key == "omega_mech_hz") cfg.omega_mech_hz = require_number_or_list(value, key);
    else if (key == "kappa_over_omega_base") cfg.kappa_over_omega_base = require_number(value, key);
    else if (key == "kappa_hz") cfg.kappa_hz = require_number_or_list(value, key);
    else if (key == "gamma_over_kappa") cfg.gamma_over_kappa = require_number(value, key);
    else if (key == "gamma_hz") cfg.gamma_hz = require_number_or_list(value, key);
    else if (key == "gtilde_over_kappa") cfg.gtilde_over_kappa = require_number(value, key);
    else if (key == "gtilde_hz") cfg.gtilde_hz = require_number_or_list(value, key);
    else if (key == "delta_hz") cfg.delta_hz = require_number_or_list(value, key);
    else if (key == "omega_cav_hz") cfg.omega_cav_hz = require_number_or_list(value, key);
    else if (key == "g_single_file") cfg.g_single_file = require_string(value, key);
    else if (key == "g_single_uniform") cfg.g_single_uniform = require_number(value, key);
    else if (key == "rwa_safety") cfg.rwa_safety = require_number(value, key);
    else
        throw ConfigError("line " + std::to_string(value.line) + ": unknown scenario key '" + key + "'");
}

}

/// Extracts the scenario under the given section prefix, on top of a base.
inline ScenarioConfig scenario_from_config(const ConfigMap& map, const std::string& section = "scenario",
                                           const ScenarioConfig& base = ScenarioConfig()) {
    ScenarioConfig cfg = base;
    const std::string prefix = section + ".";
    for (const auto& [qualified, value] : map) {
        if (qualified.rfind(prefix, 0) != 0) continue;
        detail::apply_scenario_key(cfg, qualified.substr(prefix.size()), value);
    }
    return cfg;
}

/// Builds the adjacency matrix a scenario describes.
inline Eigen::MatrixXd resolve_graph(const ScenarioConfig& cfg) {
    if (!cfg.graph_file.empty()) return load_adjacency_file(cfg.graph_file);
    GraphKind kind;
    try {
        kind = graph_kind_from_string(cfg.graph_kind);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    try {
        return make_graph(kind, cfg.graph_n);
    } catch (const ShapeError& e) {
        throw ConfigError(e.what());
    }
}

/// Resolves a scenario into physical parameters for the given graph:
/// _hz keys are multiplied by 2 pi, ratio keys are expanded against the
/// frequency base and the per-mode kappa.
inline SystemParams resolve_params(const ScenarioConfig& cfg, const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    SystemParams params;
    params.n = n;

    auto broadcast = [&](const std::vector<double>& values, const char* key, double factor) {
        Eigen::VectorXd v(n);
        if (values.size() == 1) v.setConstant(values[0] * factor);
        else if (static_cast<int>(values.size()) == n)
            for (int j = 0; j < n; ++j) v(j) = values[j] * factor;
        else
            throw ConfigError(std::string(key) + " must have 1 or " + std::to_string(n)
                              + " entries, got " + std::to_string(values.size()));
        return v;
    };

    double omega_bar;
    if (!cfg.omega_mech_hz.empty()) {
        params.omega_m = broadcast(cfg.omega_mech_hz, "omega_mech_hz", constants::two_pi);
        if (n > 1) {
            omega_bar = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    omega_bar = std::min(omega_bar, std::abs(params.omega_m(j) - params.omega_m(k)));
        } else {
            omega_bar = params.omega_m(0);
        }
    } else {
        if (!(cfg.omega_base_hz > 0.0))
            throw ConfigError("omega_base_hz must be positive, got " + std::to_string(cfg.omega_base_hz));
        omega_bar = constants::two_pi * cfg.omega_base_hz;
        params.omega_m = omega_bar * Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
    }

    params.kappa = cfg.kappa_hz.empty()
        ? Eigen::VectorXd::Constant(n, cfg.kappa_over_omega_base * omega_bar).eval()
        : broadcast(cfg.kappa_hz, "kappa_hz", constants::two_pi);
    params.gamma = cfg.gamma_hz.empty()
        ? (cfg.gamma_over_kappa * params.kappa.array()).matrix().eval()
        : broadcast(cfg.gamma_hz, "gamma_hz", constants::two_pi);
    params.g_tilde = cfg.gtilde_hz.empty()
        ? (cfg.gtilde_over_kappa * params.kappa.array()).matrix().eval()
        : broadcast(cfg.gtilde_hz, "gtilde_hz", constants::two_pi);

    params.squeezing = cfg.squeezing;
    params.temperature = cfg.temperature_k;
    if (!cfg.delta_hz.empty()) params.delta = broadcast(cfg.delta_hz, "delta_hz", constants::two_pi);
    if (!cfg.omega_cav_hz.empty())
        params.omega_c = broadcast(cfg.omega_cav_hz, "omega_cav_hz", constants::two_pi);
    if (!cfg.g_single_file.empty()) {
        params.g_single = load_square_matrix_file(cfg.g_single_file);
        if (params.g_single.rows() != n)
            throw ConfigError("g_single_file: matrix size " + std::to_string(params.g_single.rows())
                              + " does not match n = " + std::to_string(n));
    } else if (cfg.g_single_uniform != 0.0) {
        if (!(cfg.g_single_uniform > 0.0))
            throw ConfigError("g_single_uniform must be positive");
        params.g_single = Eigen::MatrixXd::Constant(n, n, cfg.g_single_uniform);
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario does not resolve to valid parameters: ") + e.what());
    }
    return params;
}

}
