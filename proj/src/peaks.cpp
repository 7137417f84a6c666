#include "rydion/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "rydion/error.hpp"

namespace rydion {

namespace {

// Vertex of the parabola through three points.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double curvature = (d1 - d0) / (x2 - x0);  // half the second derivative
  if (curvature >= 0) return {x1, y1};
  const double slope_mid = d0 + curvature * (x1 - x0);  // derivative of the parabola at x1
  const double dx = std::clamp(-slope_mid / (2.0 * curvature), x0 - x1, x2 - x1);
  return {x1 + dx, y1 + slope_mid * dx + curvature * dx * dx};
}

double interpolate_crossing(const std::vector<double>& x, const std::vector<double>& y, std::size_t inside,
                            std::size_t outside, double level) {
  const double t = (y[inside] - level) / (y[inside] - y[outside]);
  return x[inside] + t * (x[outside] - x[inside]);
}

}  // namespace

std::vector<Peak> find_peaks(const std::vector<double>& grid, const std::vector<double>& values,
                             double min_prominence) {
  if (grid.size() != values.size()) throw DomainError("find_peaks: grid and values differ in length");
  if (grid.size() < 5) throw DomainError("find_peaks: need at least 5 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("find_peaks: grid must be strictly increasing");

  const std::size_t n = values.size();
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Plateaus count once, at their left edge.
    if (!(values[i] > values[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 >= n || !(values[j + 1] < values[i])) continue;

    const double h = values[i];
    double left_min = h;
    std::size_t l = i;
    while (l > 0 && values[l - 1] <= h) left_min = std::min(left_min, values[--l]);
    double right_min = h;
    std::size_t r = j;
    while (r + 1 < n && values[r + 1] <= h) right_min = std::min(right_min, values[++r]);
    const double base = std::max(left_min, right_min);
    const double prominence = h - base;
    if (prominence < min_prominence) continue;

    Peak p;
    p.prominence = prominence;
    const std::size_t c = (i + j) / 2;
    std::tie(p.center, p.height) =
        c == i && j == i ? parabola_vertex(grid[i - 1], values[i - 1], grid[i], values[i], grid[i + 1], values[i + 1])
                         : std::pair{0.5 * (grid[i] + grid[j]), h};

    const double half = base + 0.5 * prominence;
    std::size_t a = i;
    while (a > 0 && values[a - 1] > half) --a;
    std::size_t b = j;
    while (b + 1 < n && values[b + 1] > half) ++b;
    if (a > 0 && b + 1 < n)
      p.fwhm = interpolate_crossing(grid, values, b, b + 1, half) - interpolate_crossing(grid, values, a, a - 1, half);
    peaks.push_back(p);
    i = j;
  }
  return peaks;
}

}  // namespace rydion
