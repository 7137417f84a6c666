#pragma once

#include <stdexcept>
#include <string>

namespace rydion {

/// Invalid quantum numbers or arguments outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario or basis configuration that cannot be simulated as given.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator, solver or fit failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydion
