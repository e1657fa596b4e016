#pragma once

#include <numbers>

// Units: hbar = 1, energies and angular frequencies in rad/ns, time in ns,
// flux in units of the flux quantum, temperature in kelvin.
namespace microrev::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// CODATA 2018 exact SI values.
inline constexpr double kBoltzmannJoulePerKelvin = 1.380649e-23;
inline constexpr double kReducedPlanckJouleSecond = 1.054571817e-34;

// k_B / hbar in rad/ns per kelvin (~130.920).
inline constexpr double kBoltzmannOverHbar =
    kBoltzmannJoulePerKelvin / kReducedPlanckJouleSecond * 1e-9;

/// Thermal energy k_B T in rad/ns.
constexpr double thermal_energy(double kelvin) noexcept {
  return kBoltzmannOverHbar * kelvin;
}

/// Converts a frequency in GHz to an angular frequency in rad/ns.
constexpr double ghz(double f) noexcept { return kTwoPi * f; }

}  // namespace microrev::units
