#include "rydion/scan.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "rydion/dynamics.hpp"
#include "rydion/error.hpp"

namespace rydion {

void validate(const ScanSpec& spec) {
  if (spec.grid.empty()) throw ConfigError("scan: empty detuning grid");
  if (spec.trials < 1) throw ConfigError("scan: trials must be at least 1");
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1])) throw ConfigError("scan: detuning grid must be strictly increasing");
}

std::vector<double> linear_grid(double from, double to, int points) {
  if (points < 1) throw ConfigError("grid: need at least one point");
  if (points == 1) return {from};
  if (!(to > from)) throw ConfigError("grid: upper end must exceed lower end");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (to - from) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = from + i * step;
  grid.back() = to;
  return grid;
}

std::vector<double> Spectrum::detunings() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.detuning);
  return out;
}

std::vector<double> Spectrum::probabilities() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.probability);
  return out;
}

std::vector<double> Spectrum::model_probabilities() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.model_probability);
  return out;
}

Spectrum scan(const ScanSpec& spec, const PointModel& model, int threads) {
  validate(spec);
  const std::size_t n = spec.grid.size();
  Spectrum out;
  out.points.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const double p = model(spec.grid[i]);
        const auto sample = sample_projection_noise(std::clamp(p, 0.0, 1.0), spec.trials, spec.seed + i);
        out.points[i] = {spec.grid[i], sample.estimate, sample.std_error, p};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto count = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.metadata["seed"] = std::to_string(spec.seed);
  out.metadata["trials"] = std::to_string(spec.trials);
  out.metadata["points"] = std::to_string(n);
  return out;
}

}  // namespace rydion
