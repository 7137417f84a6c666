#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rydion {

struct ScanSpec {
  std::vector<double> grid;  // detunings, rad/s, strictly increasing
  int trials = 100;
  std::uint64_t seed = 0;
};

void validate(const ScanSpec& spec);

/// `points` evenly spaced values from `from` to `to` inclusive.
std::vector<double> linear_grid(double from, double to, int points);

struct SpectrumPoint {
  double detuning = 0.0;           // rad/s
  double probability = 0.0;        // projection-noise estimate
  double std_error = 0.0;
  double model_probability = 0.0;  // noiseless value the estimate was drawn from
};

struct Spectrum {
  std::vector<SpectrumPoint> points;
  /// Ordered key/value metadata copied into JSON output (scenario name, hash, seed, ...).
  std::map<std::string, std::string> metadata;

  [[nodiscard]] std::vector<double> detunings() const;
  [[nodiscard]] std::vector<double> probabilities() const;
  [[nodiscard]] std::vector<double> model_probabilities() const;
};

/// Noiseless excitation probability at one detuning.
using PointModel = std::function<double(double detuning)>;

/// Evaluates the model on every grid point and draws projection noise with seed = spec.seed + index,
/// so the result does not depend on thread count or evaluation order. Exceptions from the model are
/// rethrown for the lowest failing index.
Spectrum scan(const ScanSpec& spec, const PointModel& model, int threads = 1);

}  // namespace rydion
