#include "rydion/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "rydion/constants.hpp"
#include "rydion/error.hpp"

namespace rydion {

namespace {

struct UnitEntry {
  std::string_view symbol;
  Dimension dimension;
  double scale;  // multiplies the number to give SI (rad/s for frequencies)
};

constexpr std::array kUnits{
    UnitEntry{"Hz", Dimension::kAngularFrequency, kTwoPi},
    UnitEntry{"kHz", Dimension::kAngularFrequency, kTwoPi * 1e3},
    UnitEntry{"MHz", Dimension::kAngularFrequency, kTwoPi * 1e6},
    UnitEntry{"GHz", Dimension::kAngularFrequency, kTwoPi * 1e9},
    UnitEntry{"rad/s", Dimension::kAngularFrequency, 1.0},
    UnitEntry{"1/s", Dimension::kAngularFrequency, 1.0},
    UnitEntry{"s", Dimension::kTime, 1.0},
    UnitEntry{"ms", Dimension::kTime, 1e-3},
    UnitEntry{"us", Dimension::kTime, 1e-6},
    UnitEntry{"ns", Dimension::kTime, 1e-9},
    UnitEntry{"m", Dimension::kLength, 1.0},
    UnitEntry{"mm", Dimension::kLength, 1e-3},
    UnitEntry{"um", Dimension::kLength, 1e-6},
    UnitEntry{"nm", Dimension::kLength, 1e-9},
    UnitEntry{"T", Dimension::kMagneticField, 1.0},
    UnitEntry{"mT", Dimension::kMagneticField, 1e-3},
    UnitEntry{"uT", Dimension::kMagneticField, 1e-6},
    UnitEntry{"G", Dimension::kMagneticField, 1e-4},
    UnitEntry{"V/m^2", Dimension::kFieldGradient, 1.0},
    UnitEntry{"kg", Dimension::kMass, 1.0},
    UnitEntry{"amu", Dimension::kMass, kConstants.amu},
    UnitEntry{"au", Dimension::kPolarizability, 1.0},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::kDimensionless: return "dimensionless";
    case Dimension::kAngularFrequency: return "frequency";
    case Dimension::kTime: return "time";
    case Dimension::kLength: return "length";
    case Dimension::kMagneticField: return "magnetic field";
    case Dimension::kFieldGradient: return "field gradient";
    case Dimension::kMass: return "mass";
    case Dimension::kPolarizability: return "polarizability";
  }
  return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const std::string original(text);
  std::string_view s = trim(text);
  double sign = 1.0;
  if (s.size() > 1 && (s.front() == '-' || s.front() == '+')) {
    // A sign ahead of "2pi*" applies to the whole quantity: "-2pi*160 MHz".
    const auto rest = s.substr(1);
    if (rest.starts_with("2pi") || rest.starts_with("2*pi")) {
      if (s.front() == '-') sign = -1.0;
      s = rest;
    }
  }
  bool two_pi = false;
  for (std::string_view prefix : {"2pi*", "2*pi*", "2pi "}) {
    if (s.substr(0, prefix.size()) == prefix) {
      two_pi = true;
      s = trim(s.substr(prefix.size()));
      break;
    }
  }

  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) throw ConfigError("cannot parse a number in '" + original + "'");
  const std::string_view unit = trim(std::string_view(end, static_cast<std::size_t>(s.data() + s.size() - end)));

  if (unit.empty()) {
    if (expected != Dimension::kDimensionless)
      throw ConfigError("'" + original + "' needs a " + std::string(to_string(expected)) + " unit");
    if (two_pi) throw ConfigError("'" + original + "': 2pi prefix only applies to frequencies");
    return value;
  }
  for (const auto& u : kUnits) {
    if (u.symbol != unit) continue;
    if (u.dimension != expected)
      throw ConfigError("'" + original + "' has a " + std::string(to_string(u.dimension)) + " unit, expected " +
                        std::string(to_string(expected)));
    if (two_pi && (expected != Dimension::kAngularFrequency || u.symbol == "rad/s" || u.symbol == "1/s"))
      throw ConfigError("'" + original + "': 2pi prefix only applies to cyclic frequency units");
    return sign * value * u.scale;
  }
  throw ConfigError("unknown unit '" + std::string(unit) + "' in '" + original + "'");
}

}  // namespace rydion
