#pragma once

namespace mechcluster::constants {

/// Reduced Planck constant [J s], CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;

/// Boltzmann constant [J/K], exact by SI definition.
inline constexpr double k_boltzmann = 1.380649e-23;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}
