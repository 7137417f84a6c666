#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydion/scan.hpp"

namespace rydion {

/// Fixed-format number rendering shared by every writer so outputs are byte-reproducible.
std::string format_number(double value, int significant = 10);

/// CSV with header "detuning_hz,probability,std_err"; detuning as cyclic frequency (angular / 2pi).
void write_csv(const Spectrum& spectrum, std::ostream& out);

/// JSON object {"metadata": {...}, "columns": [...], "points": [{detuning_hz, probability, std_err}, ...]}.
nlohmann::ordered_json spectrum_json(const Spectrum& spectrum);

struct PlotSeries {
  std::vector<double> x;  // MHz
  std::vector<double> y;
  std::vector<double> error;  // empty: drawn as a line, otherwise as points with error bars
  std::string color;
  std::string label;
};

/// Static SVG line/point plot with labelled axes.
void write_svg(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
               const std::string& y_label, std::ostream& out);

/// Spectrum plot: sampled points with error bars over the noiseless model curve, axes in MHz and probability.
void write_spectrum_svg(const Spectrum& spectrum, const std::string& title, std::ostream& out);

}  // namespace rydion
