#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mechcluster/config.hpp"
#include "mechcluster/errors.hpp"
#include "mechcluster/sweep.hpp"

namespace mechcluster {

/// Known preset names, each reproducing one reference study.
inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
    return names;
}

namespace detail {

inline ScenarioConfig preset_base() {
    ScenarioConfig cfg;
    cfg.graph_kind = "linear";
    cfg.graph_n = 4;
    cfg.squeezing = 2.0;
    cfg.temperature_k = 0.010;
    cfg.omega_base_hz = 1.0e7;
    cfg.kappa_over_omega_base = 0.02;
    cfg.gtilde_over_kappa = 0.16;
    cfg.gamma_over_kappa = 5.0e-6;
    cfg.rwa_safety = 5.0;
    return cfg;
}

/// The three graph kinds at n = 4 and n = 10, labeled kind_nN.
inline std::vector<SweepCurve> graph_size_curves(const ScenarioConfig& base) {
    std::vector<SweepCurve> curves;
    for (const char* kind : {"linear", "rectangular", "complete"})
        for (int n : {4, 10}) {
            ScenarioConfig cfg = base;
            cfg.graph_kind = kind;
            cfg.graph_n = n;
            curves.push_back({std::string(kind) + "_n" + std::to_string(n), cfg});
        }
    std::sort(curves.begin(), curves.end(),
              [](const SweepCurve& a, const SweepCurve& b) { return a.label < b.label; });
    return curves;
}

/// One curve per graph kind; the mode count comes from the sweep axis.
inline std::vector<SweepCurve> graph_kind_curves(const ScenarioConfig& base) {
    std::vector<SweepCurve> curves;
    for (const char* kind : {"complete", "linear", "rectangular"}) {
        ScenarioConfig cfg = base;
        cfg.graph_kind = kind;
        curves.push_back({kind, cfg});
    }
    return curves;
}

}

/// Builds the sweep behind a named preset:
///   fig2/fig3: fidelity and nullifiers vs gamma/kappa, log [1e-8, 1e-1]
///   fig4/fig5: vs temperature [K], log [1e-3, 1]
///   fig6:      vs mode count, even 4..20
///   fig7/fig8: vs squeezing r, linear [0, 4]
///   fig9:      vs gtilde/kappa, log [1e-3, 1]
/// all at the base point r = 2, T = 10 mK, Omega_j = j * 2pi * 10 MHz,
/// kappa = 0.02 Omega_1, gtilde = 0.16 kappa, gamma = 5e-6 kappa.
inline SweepSpec make_preset(const std::string& name) {
    const ScenarioConfig base = detail::preset_base();
    SweepSpec spec;
    if (name == "fig2" || name == "fig3") {
        spec.axis = SweepAxis::gamma;
        spec.grid = detail::build_grid(1e-8, 1e-1, 61, true, 0);
        spec.curves = detail::graph_size_curves(base);
    } else if (name == "fig4" || name == "fig5") {
        spec.axis = SweepAxis::temperature;
        spec.grid = detail::build_grid(1e-3, 1.0, 61, true, 0);
        spec.curves = detail::graph_size_curves(base);
    } else if (name == "fig6") {
        spec.axis = SweepAxis::modes;
        for (int n = 4; n <= 20; n += 2) spec.grid.push_back(n);
        spec.curves = detail::graph_kind_curves(base);
    } else if (name == "fig7" || name == "fig8") {
        spec.axis = SweepAxis::squeezing;
        spec.grid = detail::build_grid(0.0, 4.0, 41, false, 0);
        spec.curves = detail::graph_size_curves(base);
    } else if (name == "fig9") {
        spec.axis = SweepAxis::gtilde;
        spec.grid = detail::build_grid(1e-3, 1.0, 61, true, 0);
        spec.curves = detail::graph_size_curves(base);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return spec;
}

}
