#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rydion/atomic.hpp"
#include "rydion/eigensolver.hpp"
#include "rydion/trap.hpp"

namespace rydion {

/// Fine-structure manifold (n, L, J).
struct ManifoldKey {
  int n = 0;
  HalfInt L;
  HalfInt J;

  static ManifoldKey of(const ElectronicLevel& level) { return {level.n, level.L, level.J}; }
  [[nodiscard]] bool contains(const ElectronicLevel& level) const {
    return level.n == n && level.L == L && level.J == J;
  }
  [[nodiscard]] std::string label() const;
  auto operator<=>(const ManifoldKey&) const = default;
};

/// Ordered set of electronic levels, sorted by role, then n, L, J, mJ.
class LevelBasis {
 public:
  LevelBasis() = default;
  explicit LevelBasis(std::vector<ElectronicLevel> levels);

  [[nodiscard]] std::size_t size() const { return levels_.size(); }
  [[nodiscard]] const ElectronicLevel& operator[](std::size_t i) const { return levels_[i]; }
  [[nodiscard]] const std::vector<ElectronicLevel>& levels() const { return levels_; }

  [[nodiscard]] std::optional<std::size_t> index_of(int n, HalfInt L, HalfInt J, HalfInt mJ) const;
  [[nodiscard]] std::vector<std::size_t> indices_with_role(LevelRole role) const;
  [[nodiscard]] std::vector<std::size_t> manifold_indices(const ManifoldKey& key) const;
  [[nodiscard]] std::vector<ManifoldKey> manifolds() const;

 private:
  std::vector<ElectronicLevel> levels_;
};

struct DrivePart {
  Matrix matrix;     // enters as matrix * cos(frequency * t)
  double frequency;  // rad/s
};

/// H(t)/hbar = static_part + sum_k drive_k cos(omega_k t), all in rad/s.
struct TimeDependentOperator {
  Matrix static_part;
  std::vector<DrivePart> drive_parts;

  static TimeDependentOperator zero(std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(static_part.rows()); }
  [[nodiscard]] Matrix at(double t) const;
  [[nodiscard]] bool is_static() const;
  /// Largest of |static eigen-scale| and drive frequencies, used for step control.
  [[nodiscard]] double fastest_frequency() const;
  /// Merges drive parts with identical frequencies.
  TimeDependentOperator& operator+=(const TimeDependentOperator& other);
};

TimeDependentOperator operator+(TimeDependentOperator a, const TimeDependentOperator& b);

/// Polarization amplitudes over spherical components q = -1, 0, +1.
struct Polarization {
  std::array<std::complex<double>, 3> weights{};

  static Polarization sigma_plus();
  static Polarization sigma_minus();
  /// Equal superposition of sigma+ and sigma-.
  static Polarization sigma_both();
  static Polarization pi();

  [[nodiscard]] std::complex<double> weight(int q) const { return weights[q + 1]; }
  [[nodiscard]] double norm() const;
};

struct LaserDrive {
  std::string name;
  ManifoldKey lower;
  ManifoldKey upper;
  double reference_rabi = 0.0;  // rad/s, stretched (largest |CG|) transition
  double detuning = 0.0;        // laser minus zero-field transition frequency, rad/s
  Polarization polarization = Polarization::sigma_plus();
  int propagation_sign = +1;
  bool axis_aligned = true;
};

/// Throws ConfigError for unnormalized or forbidden polarization and non-dipole manifold pairs.
void validate(const LaserDrive& drive);

/// Quadrupole moment (C m^2) for a manifold; nullopt when unknown.
using QuadrupoleProvider = std::function<std::optional<double>(const ManifoldKey&)>;

/// Electron-trap quadrupole coupling: static mJ-dependent shifts from beta and an
/// RF coupling at omega_rf between mJ and mJ +- 2 of the same manifold.
/// J = 1/2 manifolds contribute nothing. Missing Q for a J > 1/2 Rydberg manifold is a ConfigError;
/// low-lying manifolds without Q are skipped.
TimeDependentOperator electron_trap_hamiltonian(const LevelBasis& basis, const TrapGeometry& trap,
                                                const QuadrupoleProvider& quadrupole,
                                                const PhysicalConstants& c = kConstants);

/// Static quadrupole shift (rad/s) of |J mJ>; for J = 3/2 this is (2/5)(-1)^(|mJ|-1/2) beta Q / hbar.
double quadrupole_static_shift(HalfInt J, HalfInt mJ, double beta, double quadrupole,
                               const PhysicalConstants& c = kConstants);
/// RF coupling amplitude (rad/s) between |J mJ> and |J mJ+2>; for J = 3/2 this is C = 2 Q alpha / (5 sqrt(3) hbar).
double quadrupole_rf_coupling(HalfInt J, HalfInt mJ, double alpha, double quadrupole,
                              const PhysicalConstants& c = kConstants);

TimeDependentOperator zeeman_hamiltonian(const LevelBasis& basis, double field_tesla,
                                         const PhysicalConstants& c = kConstants);

/// Rotating-frame laser Hamiltonian (RWA on the optical transitions). Each manifold sits in the
/// frame of the laser path that reaches it, so its diagonal carries minus the cumulative detuning.
TimeDependentOperator laser_hamiltonian(const LevelBasis& basis, const std::vector<LaserDrive>& drives);

/// Relative dipole weight of lower|mJ> -> upper|mJ + q>, normalized to the stretched transition.
double relative_dipole_weight(const ManifoldKey& lower, HalfInt m_lower, const ManifoldKey& upper, int q);

struct AssemblyInputs {
  TrapGeometry trap;
  double field_tesla = 0.0;
  std::vector<LaserDrive> drives;
  QuadrupoleProvider quadrupole;
};

TimeDependentOperator assemble(const LevelBasis& basis, const AssemblyInputs& inputs,
                               const PhysicalConstants& c = kConstants);

struct EffectiveHamiltonian {
  std::vector<std::size_t> kept;  // indices into the original basis
  Matrix hamiltonian;             // on the kept subspace, rad/s
};

/// Second-order elimination of the far-detuned intermediate levels:
/// H_eff(i,j) = H_ij + sum_e H_ie H_ej [1/(E_i - H_ee) + 1/(E_j - H_ee)] / 2.
/// E_i defaults to H_ii; pass reference_energies (indexed like the full basis) to override.
/// Zero detuning throws NumericalError; |detuning| < 3 x coupling prints a warning.
EffectiveHamiltonian adiabatic_eliminate(const Matrix& rotating_frame_h,
                                         const std::vector<std::size_t>& intermediate,
                                         const std::optional<RealVector>& reference_energies = std::nullopt);

}  // namespace rydion
