#include "rydion/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "rydion/error.hpp"
#include "rydion/trap.hpp"

namespace rydion {

void validate(const LineshapeParams& p) {
  if (!(p.base_fwhm > 0)) throw DomainError("lineshape: base linewidth must be positive");
  if (p.mean_phonons_x < 0 || p.mean_phonons_y < 0) throw DomainError("lineshape: mean phonon numbers must be >= 0");
}

int thermal_truncation(double nbar, double tolerance) {
  if (nbar < 0) throw DomainError("thermal_truncation: negative mean phonon number");
  if (nbar == 0.0) return 0;
  // The tail beyond N carries r^(N+1) with r = nbar / (1 + nbar).
  const double r = nbar / (1.0 + nbar);
  return std::max(0, static_cast<int>(std::ceil(std::log(tolerance) / std::log(r))) - 1);
}

double lorentzian(double detuning, double fwhm) {
  const double x = 2.0 * detuning / fwhm;
  return 1.0 / (1.0 + x * x);
}

namespace {

struct Component {
  double shift;
  double weight;
};

std::vector<Component> components(const LineshapeParams& p) {
  const int nx_max = thermal_truncation(p.mean_phonons_x);
  const int ny_max = thermal_truncation(p.mean_phonons_y);
  std::vector<double> py(static_cast<std::size_t>(ny_max) + 1);
  for (int ny = 0; ny <= ny_max; ++ny) py[static_cast<std::size_t>(ny)] = thermal_occupation(p.mean_phonons_y, ny);
  std::vector<Component> out;
  out.reserve(static_cast<std::size_t>((nx_max + 1) * (ny_max + 1)));
  for (int nx = 0; nx <= nx_max; ++nx) {
    const double px = thermal_occupation(p.mean_phonons_x, nx);
    for (int ny = 0; ny <= ny_max; ++ny)
      out.push_back({nx * p.delta_omega_x + ny * p.delta_omega_y, px * py[static_cast<std::size_t>(ny)]});
  }
  return out;
}

}  // namespace

std::vector<double> thermal_lineshape(const LineshapeParams& p, const std::vector<double>& grid) {
  validate(p);
  const auto comps = components(p);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (const auto& c : comps) sum += c.weight * lorentzian(grid[i] - p.carrier - c.shift, p.base_fwhm);
    out[i] = p.amplitude * sum;
  }
  return out;
}

double component_centroid(const LineshapeParams& p) {
  validate(p);
  double num = 0.0, den = 0.0;
  for (const auto& c : components(p)) {
    num += c.weight * c.shift;
    den += c.weight;
  }
  return p.carrier + num / den;
}

double sampled_fwhm(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.size() < 3) throw DomainError("sampled_fwhm: need matching grids of >= 3 points");
  const auto peak = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  const double half = 0.5 * values[peak];
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (values[inside] - half) / (values[inside] - values[outside]);
    return grid[inside] + t * (grid[outside] - grid[inside]);
  };
  std::size_t lo = peak;
  while (lo > 0 && values[lo - 1] > half) --lo;
  std::size_t hi = peak;
  while (hi + 1 < values.size() && values[hi + 1] > half) ++hi;
  if (lo == 0 || hi + 1 == values.size()) return 0.0;
  return crossing(hi, hi + 1) - crossing(lo, lo - 1);
}

namespace {

// Parameters are fitted in units of 2pi x 1 MHz to keep the Jacobian well scaled.
constexpr double kFitUnit = kTwoPi * 1e6;

struct LineFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>* grid;
  const std::vector<double>* data;
  LineshapeParams fixed;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(grid->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    LineshapeParams p = fixed;
    p.delta_omega_x = p.delta_omega_y = x(0) * kFitUnit;
    p.carrier = x(1) * kFitUnit;
    p.amplitude = x(2);
    const auto model = thermal_lineshape(p, *grid);
    for (std::size_t i = 0; i < model.size(); ++i) f(static_cast<Eigen::Index>(i)) = model[i] - (*data)[i];
    return 0;
  }
};

}  // namespace

DeltaOmegaFit fit_delta_omega(const std::vector<double>& grid, const std::vector<double>& values, double nbar_x,
                              double nbar_y, double base_fwhm) {
  if (grid.size() != values.size() || grid.size() < 5) throw DomainError("fit_delta_omega: need >= 5 matching points");
  if (!(base_fwhm > 0)) throw DomainError("fit_delta_omega: base linewidth must be positive");

  std::vector<double> smooth(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = std::min(values.size() - 1, i + 1);
    smooth[i] = (values[a] + values[i] + values[b]) / static_cast<double>(b - a + 1);
  }
  const auto peak = static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double observed = sampled_fwhm(grid, smooth);
  const double nbar_sum = nbar_x + nbar_y;
  const double dw0 = (nbar_sum > 0 && observed > 0) ? -(observed - base_fwhm) / nbar_sum : 0.0;

  LineFunctor functor{&grid, &values, {}};
  functor.fixed.base_fwhm = base_fwhm;
  functor.fixed.mean_phonons_x = nbar_x;
  functor.fixed.mean_phonons_y = nbar_y;

  // The peak of a red-shifted thermal line sits near carrier + nbar dw, not at the carrier.
  Eigen::VectorXd x(3);
  x << dw0 / kFitUnit, grid[peak] / kFitUnit, *std::max_element(values.begin(), values.end());
  {
    LineshapeParams trial = functor.fixed;
    trial.delta_omega_x = trial.delta_omega_y = dw0;
    trial.carrier = 0.0;
    const auto shape = thermal_lineshape(trial, grid);
    // Shift the carrier so the model maximum lands on the observed one.
    const auto model_peak = std::max_element(shape.begin(), shape.end()) - shape.begin();
    const double offset = grid[static_cast<std::size_t>(model_peak)];
    x(1) = (grid[peak] - offset) / kFitUnit;
    const double height = shape[static_cast<std::size_t>(model_peak)];
    if (height > 0) x(2) = smooth[peak] / height;
  }

  Eigen::NumericalDiff<LineFunctor, Eigen::Central> numeric(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<LineFunctor, Eigen::Central>> lm(numeric);
  lm.parameters.maxfev = 2000;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !x.allFinite())
    throw NumericalError("fit_delta_omega: no convergence (status " + std::to_string(static_cast<int>(status)) +
                         ", " + std::to_string(lm.nfev) + " evaluations, last dw = " +
                         std::to_string(x(0)) + " x 2pi MHz)");

  Eigen::VectorXd residual(static_cast<Eigen::Index>(grid.size()));
  functor(x, residual);
  return {x(0) * kFitUnit, x(1) * kFitUnit, x(2), residual.norm(), static_cast<int>(lm.iter)};
}

}  // namespace rydion
