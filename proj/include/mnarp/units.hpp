#pragma once

#include <numbers>

// Internal unit system: energies in meV, times in ps, angular frequencies in
// rad/ps. An energy E corresponds to the angular frequency E / hbar.
namespace mnarp::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;

/// Reduced Planck constant in meV ps.
inline constexpr double hbar = 0.6582119;

/// Boltzmann constant in meV / K.
inline constexpr double k_boltzmann = 0.08617333;

constexpr double meV_to_radps(double energy_meV) { return energy_meV / hbar; }
constexpr double radps_to_meV(double omega) { return omega * hbar; }

} // namespace mnarp::units
