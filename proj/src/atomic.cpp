#include "rydion/atomic.hpp"

#include <array>
#include <cmath>
#include <iostream>
#include <utility>

#include "rydion/error.hpp"

namespace rydion {

namespace {
constexpr std::array<std::pair<LevelRole, std::string_view>, 5> kRoleNames{{
    {LevelRole::kInitial, "initial"},
    {LevelRole::kIntermediate, "intermediate"},
    {LevelRole::kRydberg, "rydberg"},
    {LevelRole::kGround, "ground"},
    {LevelRole::kShelf, "shelf"},
}};

constexpr std::string_view kOrbitalLetters = "SPDFGHIK";
}  // namespace

std::string_view to_string(LevelRole role) {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "unknown";
}

std::optional<LevelRole> parse_level_role(std::string_view text) {
  for (const auto& [r, name] : kRoleNames)
    if (name == text) return r;
  return std::nullopt;
}

ElectronicLevel ElectronicLevel::make(int n, int L, HalfInt J, HalfInt mJ, LevelRole role) {
  ElectronicLevel level{n, HalfInt::integer(L), HalfInt::half(1), J, mJ, role};
  validate(level);
  return level;
}

void validate(const ElectronicLevel& level) {
  if (level.n <= 0) throw DomainError("level: principal quantum number must be positive");
  if (!level.L.is_integer() || level.L.twice() < 0 || level.L.value() >= level.n)
    throw DomainError("level: orbital quantum number must be an integer in [0, n)");
  if (level.S != HalfInt::half(1)) throw DomainError("level: single valence electron requires S = 1/2");
  if (!triangle(level.L, level.S, level.J))
    throw DomainError("level " + level.manifold_label() + ": J outside |L-S|..L+S");
  if (!valid_projection(level.J, level.mJ))
    throw DomainError("level " + level.manifold_label() + ": |mJ| > J");
  if (level.role == LevelRole::kRydberg && level.n < 20)
    throw DomainError("level " + level.manifold_label() + ": Rydberg role requires n >= 20");
}

std::string ElectronicLevel::manifold_label() const {
  const int l = L.twice() / 2;
  const char letter = l < static_cast<int>(kOrbitalLetters.size()) ? kOrbitalLetters[l] : '?';
  return std::to_string(n) + letter + J.str();
}

std::string ElectronicLevel::label() const {
  const std::string sign = mJ.twice() >= 0 ? "+" : "";
  return manifold_label() + "(" + sign + mJ.str() + ")";
}

double lande_g(const ElectronicLevel& level) {
  if (level.J.twice() == 0) throw DomainError("lande_g: J = 0 has no Zeeman projection");
  const double j = level.J.value(), l = level.L.value(), s = level.S.value();
  return 1.0 + (j * (j + 1) + s * (s + 1) - l * (l + 1)) / (2.0 * j * (j + 1));
}

double zeeman_shift(const ElectronicLevel& level, double field_tesla, const PhysicalConstants& c) {
  if (field_tesla < 0) throw DomainError("zeeman_shift: field magnitude must be non-negative");
  return lande_g(level) * level.mJ.value() * c.mu_B * field_tesla / c.hbar;
}

double quadrupole_moment(int n, HalfInt L, HalfInt /*J*/, double core_charge, const PhysicalConstants& c) {
  if (n < 10) std::cerr << "warning: quadrupole_moment: n = " << n << " is outside the n >> 1 regime\n";
  const double l = L.value();
  const double nn = static_cast<double>(n) * n;
  return c.e * c.a0 * c.a0 * nn * (5.0 * nn + 1.0 - 3.0 * l * (l + 1.0)) / (2.0 * (2.0 * core_charge + 1.0));
}

double polarizability_scale(const RydbergStateData& reference, int n_target) {
  const double ratio = static_cast<double>(n_target) / reference.level.n;
  return reference.polarizability_au * std::pow(ratio, 7);
}

}  // namespace rydion
