#include "rydion/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rydion/constants.hpp"

namespace rydion {

std::string format_number(double value, int significant) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, value);
  return buf;
}

void write_csv(const Spectrum& spectrum, std::ostream& out) {
  out << "detuning_hz,probability,std_err\n";
  for (const auto& p : spectrum.points)
    out << format_number(p.detuning / kTwoPi) << ',' << format_number(p.probability) << ','
        << format_number(p.std_error) << '\n';
}

nlohmann::ordered_json spectrum_json(const Spectrum& spectrum) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : spectrum.metadata) j["metadata"][k] = v;
  j["columns"] = {"detuning_hz", "probability", "std_err"};
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : spectrum.points) {
    nlohmann::ordered_json row;
    row["detuning_hz"] = std::stod(format_number(p.detuning / kTwoPi));
    row["probability"] = std::stod(format_number(p.probability));
    row["std_err"] = std::stod(format_number(p.std_error));
    points.push_back(row);
  }
  j["points"] = points;
  return j;
}

namespace {

struct Axis {
  double lo, hi;
  double to_pixel(double v, double p0, double p1) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_svg(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
               const std::string& y_label, std::ostream& out) {
  constexpr double width = 720, height = 450, left = 70, right = 20, top = 40, bottom = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = 0.0, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      const double e = s.error.empty() ? 0.0 : s.error[i];
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  }
  if (!(xmax > xmin)) { xmin -= 1; xmax += 1; }
  if (!(ymax > ymin)) ymax = ymin + 1;
  ymax += 0.05 * (ymax - ymin);
  const Axis ax{xmin, xmax}, ay{ymin, ymax};
  auto X = [&](double v) { return ax.to_pixel(v, left, width - right); };
  auto Y = [&](double v) { return ay.to_pixel(v, height - bottom, top); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";

  const double xs = nice_step(xmax - xmin, 8), ys = nice_step(ymax - ymin, 6);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    out << "<line x1=\"" << px(X(t)) << "\" y1=\"" << px(height - bottom) << "\" x2=\"" << px(X(t)) << "\" y2=\""
        << px(height - bottom + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(X(t)) << "\" y=\"" << px(height - bottom + 18) << "\" text-anchor=\"middle\">"
        << format_number(std::abs(t) < 1e-12 * xs ? 0.0 : t, 6) << "</text>\n";
  }
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    out << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(Y(t)) << "\" x2=\"" << px(left) << "\" y2=\""
        << px(Y(t)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(left - 8) << "\" y=\"" << px(Y(t) + 4) << "\" text-anchor=\"end\">"
        << format_number(std::abs(t) < 1e-12 * ys ? 0.0 : t, 6) << "</text>\n";
  }
  out << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(width - left - right)
      << "\" height=\"" << px(height - top - bottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << px((left + width - right) / 2) << "\" y=\"" << px(height - 15)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << px((top + height - bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  double legend_y = top + 16;
  for (const auto& s : series) {
    if (s.error.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? " " : "") << px(X(s.x[i])) << ',' << px(Y(s.y[i]));
      out << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << "<line x1=\"" << px(X(s.x[i])) << "\" y1=\"" << px(Y(s.y[i] - s.error[i])) << "\" x2=\""
            << px(X(s.x[i])) << "\" y2=\"" << px(Y(s.y[i] + s.error[i])) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"0.7\"/>\n";
        out << "<circle cx=\"" << px(X(s.x[i])) << "\" cy=\"" << px(Y(s.y[i])) << "\" r=\"1.8\" fill=\"" << s.color
            << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      out << "<text x=\"" << px(width - right - 10) << "\" y=\"" << px(legend_y) << "\" text-anchor=\"end\" fill=\""
          << s.color << "\">" << escape(s.label) << "</text>\n";
      legend_y += 16;
    }
  }
  out << "</svg>\n";
}

void write_spectrum_svg(const Spectrum& spectrum, const std::string& title, std::ostream& out) {
  PlotSeries model{{}, {}, {}, "#1f4e8c", "model"};
  PlotSeries data{{}, {}, {}, "black", "sampled"};
  for (const auto& p : spectrum.points) {
    const double mhz_value = p.detuning / (kTwoPi * 1e6);
    model.x.push_back(mhz_value);
    model.y.push_back(p.model_probability);
    data.x.push_back(mhz_value);
    data.y.push_back(p.probability);
    data.error.push_back(p.std_error);
  }
  write_svg({model, data}, title, "two-photon detuning (MHz)", "excitation probability", out);
}

}  // namespace rydion
