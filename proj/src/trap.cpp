#include "rydion/trap.hpp"

#include <cmath>
#include <iostream>

#include "rydion/error.hpp"

namespace rydion {

namespace {
constexpr double kMaxStableQ = 0.9;
constexpr double kSecularApproxQ = 0.4;
}  // namespace

double thermal_occupation(double mean_phonon_number, int n) {
  if (mean_phonon_number < 0) throw DomainError("thermal_occupation: negative mean phonon number");
  if (n < 0) return 0.0;
  if (mean_phonon_number == 0.0) return n == 0 ? 1.0 : 0.0;
  const double ratio = mean_phonon_number / (1.0 + mean_phonon_number);
  return std::pow(ratio, n) / (1.0 + mean_phonon_number);
}

MathieuParameters mathieu_parameters(const TrapGeometry& trap, double mass, const PhysicalConstants& c) {
  if (trap.omega_rf <= 0) throw DomainError("trap: RF drive frequency must be positive");
  if (mass <= 0) throw DomainError("trap: mass must be positive");
  const double scale = c.e / (mass * trap.omega_rf * trap.omega_rf);
  return {4.0 * trap.alpha * scale, -8.0 * trap.beta * scale};
}

double axial_frequency(double beta, double mass, const PhysicalConstants& c) {
  if (beta <= 0) throw DomainError("trap: beta must be positive for axial confinement");
  return std::sqrt(4.0 * c.e * beta / mass);
}

SecularFrequencies secular_frequencies(const TrapGeometry& trap, double mass, const PhysicalConstants& c) {
  if (trap.alpha < 0) throw DomainError("trap: alpha must be non-negative");
  if (trap.beta <= 0) throw DomainError("trap: beta must be positive for axial confinement");
  const auto [q, a] = mathieu_parameters(trap, mass, c);
  if (q >= kMaxStableQ) throw NumericalError("trap: Mathieu q = " + std::to_string(q) + " outside the stable region");
  if (q > kSecularApproxQ)
    std::cerr << "warning: Mathieu q = " << q << " > 0.4, lowest-order secular approximation degrades\n";
  const double radial_sq = 0.5 * q * q + a;
  if (radial_sq <= 0)
    throw NumericalError("trap: q^2/2 + a = " + std::to_string(radial_sq) + " <= 0, no radial confinement");
  const double radial = 0.5 * trap.omega_rf * std::sqrt(radial_sq);
  return {axial_frequency(trap.beta, mass, c), radial, radial};
}

InferredTrap infer_gradients(const SecularFrequencies& secular, double omega_rf, double mass,
                             const PhysicalConstants& c) {
  if (secular.omega_axial <= 0 || secular.mean_radial() <= 0)
    throw DomainError("infer_gradients: secular frequencies must be positive");
  if (omega_rf <= 0) throw DomainError("infer_gradients: RF drive frequency must be positive");
  const double beta = mass * secular.omega_axial * secular.omega_axial / (4.0 * c.e);
  const double a = -8.0 * c.e * beta / (mass * omega_rf * omega_rf);
  const double ratio = 2.0 * secular.mean_radial() / omega_rf;
  const double q_sq = 2.0 * (ratio * ratio - a);
  if (q_sq <= 0) throw NumericalError("infer_gradients: inconsistent secular frequencies");
  const double q = std::sqrt(q_sq);
  InferredTrap out;
  out.geometry = {q * mass * omega_rf * omega_rf / (4.0 * c.e), beta, omega_rf};
  out.radial_asymmetry = secular.omega_radial_2 - secular.omega_radial_1;
  return out;
}

double lamb_dicke(double wavelength_1, double wavelength_2, BeamGeometry geometry, double mass,
                  double omega_mode, const PhysicalConstants& c) {
  if (wavelength_1 <= 0 || wavelength_2 <= 0 || omega_mode <= 0 || mass <= 0)
    throw DomainError("lamb_dicke: wavelengths, mass and mode frequency must be positive");
  const double k1 = kTwoPi / wavelength_1;
  const double k2 = kTwoPi / wavelength_2;
  const double k_eff = geometry == BeamGeometry::kCounterPropagating ? std::abs(k1 - k2) : k1 + k2;
  return k_eff * std::sqrt(c.hbar / (2.0 * mass * omega_mode));
}

ModifiedFrequency modified_radial_frequency(double omega0, const TrapGeometry& trap, double polarizability_au,
                                            double mass, const PhysicalConstants& c) {
  if (omega0 <= 0) throw DomainError("modified_radial_frequency: omega0 must be positive");
  const double polarizability = polarizability_au * c.polarizability_au();
  const double gradient_sq = trap.alpha * trap.alpha + 2.0 * trap.beta * trap.beta;
  const double softening = 2.0 * gradient_sq * polarizability / mass;
  const double omega1_sq = omega0 * omega0 - softening;
  if (omega1_sq <= 0) throw NumericalError("anti-trapped Rydberg state: omega1^2 <= 0");
  const double omega1 = std::sqrt(omega1_sq);
  // omega1 - omega0 without cancellation
  return {omega1, -softening / (omega0 + omega1)};
}

}  // namespace rydion
