#include "rydion/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "rydion/error.hpp"

namespace rydion {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, the embedded fourth-order difference.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double scaled_error(const Matrix& err, const Matrix& y0, const Matrix& y1, double atol, double rtol) {
  // Squared magnitudes avoid a hypot call per entry.
  const Eigen::ArrayXXd size = y0.cwiseAbs2().array().max(y1.cwiseAbs2().array()).sqrt();
  const Eigen::ArrayXXd scale = atol + rtol * size;
  return std::sqrt((err.cwiseAbs2().array() / scale.square()).maxCoeff());
}

}  // namespace

IntegrationReport integrate(const Rhs& rhs, Matrix& y, double t0, double t1, const StepControl& control) {
  IntegrationReport report;
  const double span = t1 - t0;
  if (span == 0.0) return report;
  if (span < 0) throw DomainError("integrate: t1 must not precede t0");
  const double min_step = control.min_step > 0 ? control.min_step : 1e-14 * span;

  Matrix k1(y.rows(), y.cols()), k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
  Matrix stage(y.rows(), y.cols()), y_new(y.rows(), y.cols());

  rhs(t0, y, k1);
  double h = control.initial_step;
  if (h <= 0) {
    const double f = k1.cwiseAbs().maxCoeff();
    const double s = control.atol + control.rtol * y.cwiseAbs().maxCoeff();
    h = f > 0 ? 0.01 * s / f : span;
    h = std::isfinite(h) ? std::max(h, 1e-6 * span) : 1e-6 * span;
  }
  h = std::min({h, control.max_step, span});

  double t = t0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    stage = y + h * a21 * k1;
    rhs(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, stage, k6);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, y_new, k7);
    stage = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // A non-finite estimate (overflow or NaN from the right-hand side) is treated as a large error,
    // so the step shrinks until it either recovers or underflows.
    const double raw = scaled_error(stage, y, y_new, control.atol, control.rtol);
    const double err = std::isfinite(raw) ? raw : 1e10;
    if (err <= 1.0) {
      t = (t1 - t - h) < 1e-15 * span ? t1 : t + h;
      y.swap(y_new);
      k1.swap(k7);  // first-same-as-last
      ++report.accepted;
      report.max_error = std::max(report.max_error, err * control.atol);
      report.last_step = h;
    } else {
      ++report.rejected;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(h * factor, control.max_step);
    if (t < t1 && h < min_step) {
      std::string msg = "integrate: step size underflow at t = " + std::to_string(t);
      if (control.stiffness_hint) msg += "; " + control.stiffness_hint();
      throw NumericalError(msg);
    }
  }
  return report;
}

}  // namespace rydion
