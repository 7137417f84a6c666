#pragma once

#include "rydion/constants.hpp"

namespace rydion {

/// Quadrupole trap potential Phi = alpha cos(Omega t) (x^2 - y^2) - beta (x^2 + y^2 - 2 z^2).
struct TrapGeometry {
  double alpha = 0.0;     // RF field gradient, V/m^2
  double beta = 0.0;      // static field gradient, V/m^2
  double omega_rf = 0.0;  // rad/s
};

struct SecularFrequencies {
  double omega_axial = 0.0;
  double omega_radial_1 = 0.0;
  double omega_radial_2 = 0.0;

  [[nodiscard]] double mean_radial() const { return 0.5 * (omega_radial_1 + omega_radial_2); }
};

enum class Axis { kX, kY, kZ };

struct MotionalMode {
  double frequency = 0.0;  // rad/s
  double mean_phonon_number = 0.0;
  Axis axis = Axis::kX;
};

/// Thermal occupation n̄^n / (1 + n̄)^(n+1).
double thermal_occupation(double mean_phonon_number, int n);

struct MathieuParameters {
  double q = 0.0;
  double a = 0.0;
};

MathieuParameters mathieu_parameters(const TrapGeometry& trap, double mass,
                                     const PhysicalConstants& c = kConstants);

/// Axial secular frequency sqrt(4 e beta / m); independent of the RF gradient.
double axial_frequency(double beta, double mass, const PhysicalConstants& c = kConstants);

/// Lowest-order secular frequencies: omega_r = (Omega/2) sqrt(q^2/2 + a), omega_z = sqrt(4 e beta / m).
/// Throws NumericalError when q^2/2 + a <= 0 or q >= 0.9.
SecularFrequencies secular_frequencies(const TrapGeometry& trap, double mass,
                                       const PhysicalConstants& c = kConstants);

struct InferredTrap {
  TrapGeometry geometry;
  /// omega_radial_2 - omega_radial_1; the quadrupole potential is radially symmetric and cannot carry it.
  double radial_asymmetry = 0.0;
};

/// Inverse of secular_frequencies using the mean of the two radial frequencies.
InferredTrap infer_gradients(const SecularFrequencies& secular, double omega_rf, double mass,
                             const PhysicalConstants& c = kConstants);

enum class BeamGeometry { kCoPropagating, kCounterPropagating };

/// Lamb-Dicke parameter of a two-photon transition along a mode of frequency omega_mode.
double lamb_dicke(double wavelength_1, double wavelength_2, BeamGeometry geometry, double mass,
                  double omega_mode, const PhysicalConstants& c = kConstants);

struct ModifiedFrequency {
  double omega1 = 0.0;       // radial frequency in the Rydberg state
  double delta_omega = 0.0;  // omega1 - omega0
};

/// Radial frequency with the extra potential -(alpha^2 + 2 beta^2) P rho^2 of a polarizable state.
/// Throws NumericalError when the state is anti-trapped.
ModifiedFrequency modified_radial_frequency(double omega0, const TrapGeometry& trap,
                                            double polarizability_au, double mass,
                                            const PhysicalConstants& c = kConstants);

}  // namespace rydion
