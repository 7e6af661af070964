#pragma once

#include <Eigen/Dense>

#include "mechcluster/constants.hpp"
#include "mechcluster/model.hpp"

namespace fixtures {

/// Harmonic frequency ladder at the default operating point: mode j at
/// (j+1) x 2 pi x 10 MHz, kappa = 0.02 of the spacing, g_tilde = 0.16 kappa,
/// gamma = 5e-6 kappa, 10 mK bath.
inline mechcluster::SystemParams ladder_params(int n, double squeezing = 2.0,
                                               double temperature = 0.010) {
    mechcluster::SystemParams p;
    p.n = n;
    const double obar = mechcluster::constants::two_pi * 1.0e7;
    p.omega_m.resize(n);
    for (int j = 0; j < n; ++j) p.omega_m(j) = (j + 1) * obar;
    const double kappa = 0.02 * obar;
    p.kappa = Eigen::VectorXd::Constant(n, kappa);
    p.gamma = Eigen::VectorXd::Constant(n, 5e-6 * kappa);
    p.g_tilde = Eigen::VectorXd::Constant(n, 0.16 * kappa);
    p.squeezing = squeezing;
    p.temperature = temperature;
    return p;
}

}  // namespace fixtures
