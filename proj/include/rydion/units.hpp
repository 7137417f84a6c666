#pragma once

#include <string>
#include <string_view>

namespace rydion {

/// Physical dimension a scenario quantity must carry.
enum class Dimension {
  kDimensionless,
  kAngularFrequency,  // stored in rad/s
  kTime,              // s
  kLength,            // m
  kMagneticField,     // T
  kFieldGradient,     // V/m^2
  kMass,              // kg
  kPolarizability,    // atomic units
};

std::string_view to_string(Dimension d);

/// Parses "<number> <unit>" with an optional "2pi*" prefix into SI (angular frequencies in rad/s).
///
/// Frequencies written as "2pi*135 MHz" and "135 MHz" denote the same angular frequency
/// 2 pi x 135e6 rad/s; only an explicit "rad/s" unit skips the 2 pi. Throws ConfigError when
/// the unit does not resolve to the expected dimension; a missing unit counts as dimensionless.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace rydion
