#pragma once

#include <vector>

namespace rydion {

struct Peak {
  double center = 0.0;      // parabolic sub-grid estimate
  double height = 0.0;      // value at the refined center
  double fwhm = 0.0;        // width at half prominence above the local base; 0 when a side never drops that far
  double prominence = 0.0;  // height above the higher of the two flanking minima
};

/// Local maxima of sampled data with topographic prominence of at least `min_prominence`,
/// in ascending order of center. Needs at least 5 points; the grid must be strictly increasing.
std::vector<Peak> find_peaks(const std::vector<double>& grid, const std::vector<double>& values,
                             double min_prominence);

}  // namespace rydion
