#pragma once

#include <functional>
#include <limits>
#include <string>

#include "rydion/eigensolver.hpp"

namespace rydion {

using Rhs = std::function<void(double t, const Matrix& y, Matrix& dydt)>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-11;
  double initial_step = 0.0;  // 0: estimate from |f(y0)|
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 0.0;      // 0: 1e-14 x span
  /// Called to describe the dominant term when the step underflows.
  std::function<std::string()> stiffness_hint;
};

struct IntegrationReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_error = 0.0;  // largest accepted scaled error estimate times atol
  double last_step = 0.0;
};

/// Adaptive Dormand-Prince 5(4) with a max-norm error controller. Advances y from t0 to t1
/// in place. Throws NumericalError on step-size underflow.
IntegrationReport integrate(const Rhs& rhs, Matrix& y, double t0, double t1, const StepControl& control);

}  // namespace rydion
