#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "rydion/angular.hpp"
#include "rydion/constants.hpp"

namespace rydion {

enum class LevelRole { kInitial, kIntermediate, kRydberg, kGround, kShelf };

std::string_view to_string(LevelRole role);
std::optional<LevelRole> parse_level_role(std::string_view text);

/// Fine-structure Zeeman sublevel |n L J mJ> of the valence electron.
struct ElectronicLevel {
  int n = 0;
  HalfInt L;
  HalfInt S = HalfInt::half(1);
  HalfInt J;
  HalfInt mJ;
  LevelRole role = LevelRole::kInitial;

  /// Validated construction; throws DomainError when the quantum numbers are inconsistent.
  static ElectronicLevel make(int n, int L, HalfInt J, HalfInt mJ, LevelRole role);

  /// Same (n, L, J) fine-structure manifold.
  [[nodiscard]] bool same_manifold(const ElectronicLevel& o) const {
    return n == o.n && L == o.L && J == o.J;
  }
  /// Spectroscopic label such as "24D3/2(+1/2)".
  [[nodiscard]] std::string label() const;
  [[nodiscard]] std::string manifold_label() const;

  auto operator<=>(const ElectronicLevel&) const = default;
};

void validate(const ElectronicLevel& level);

struct RydbergStateData {
  ElectronicLevel level;
  double polarizability_au = 0.0;   // scalar polarizability, atomic units
  double natural_linewidth = 0.0;   // rad/s
  double decay_branching_to_ground = 1.0;
};

/// Landé factor from the Landé projection of L_z + 2 S_z; J = 0 is a DomainError.
double lande_g(const ElectronicLevel& level);

/// Zeeman shift g_J mJ mu_B B / hbar in rad/s for a field along the quantization axis.
/// The Gaussian-unit form -(e / 2 m_e c) B (L_z + 2 S_z) reduces to this in SI.
double zeeman_shift(const ElectronicLevel& level, double field_tesla,
                    const PhysicalConstants& c = kConstants);

/// Hydrogenic estimate of the quadrupole moment magnitude (C m^2):
/// Q = e a0^2 n^2 [5 n^2 + 1 - 3 L (L + 1)] / (2 (2 Ze + 1)).
/// The default core charge Ze = 1 reproduces the 24D3/2 shift of 2pi*43 kHz at
/// beta = 6e5 V/m^2; the physical Sr2+ core has Ze = 2.
double quadrupole_moment(int n, HalfInt L, HalfInt J, double core_charge = 1.0,
                         const PhysicalConstants& c = kConstants);

/// n^7 extrapolation of a reference polarizability. An estimate only; tabulated values win.
double polarizability_scale(const RydbergStateData& reference, int n_target);

/// Reference 42S1/2 polarizability from quantum-defect theory, atomic units.
inline constexpr double kPolarizability42S = 17.6e9;

}  // namespace rydion
