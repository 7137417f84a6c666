#pragma once

#include <numbers>

namespace rydion {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// CODATA 2018 values, SI units. Every module reads from this table.
struct PhysicalConstants {
  double e = 1.602176634e-19;             // C
  double a0 = 5.29177210903e-11;          // m
  double hbar = 1.054571817e-34;          // J s
  double mu_B = 9.2740100783e-24;         // J/T
  double amu = 1.66053906660e-27;         // kg
  double hartree = 4.3597447222071e-18;   // J
  double ion_mass_amu = 88.0;             // 88Sr+

  /// One atomic unit of polarizability, e^2 a0^2 / E_h = 1.6487773e-41 C^2 m^2 J^-1.
  [[nodiscard]] constexpr double polarizability_au() const {
    return e * e * a0 * a0 / hartree;
  }
  [[nodiscard]] constexpr double ion_mass() const { return ion_mass_amu * amu; }
};

inline constexpr PhysicalConstants kConstants{};

/// Convert a cyclic frequency in MHz to angular frequency (rad/s).
constexpr double mhz(double f) { return kTwoPi * f * 1e6; }
constexpr double khz(double f) { return kTwoPi * f * 1e3; }
constexpr double to_mhz(double omega) { return omega / (kTwoPi * 1e6); }
constexpr double to_khz(double omega) { return omega / (kTwoPi * 1e3); }

}  // namespace rydion
