#pragma once

#include <vector>

namespace rydion {

/// Thermally broadened Rydberg line. Each motional state |n_x, n_y> contributes a Lorentzian
/// shifted by n_x dw_x + n_y dw_y (Kronecker-delta Franck-Condon factors), weighted by the
/// thermal occupations of the two radial modes.
struct LineshapeParams {
  double carrier = 0.0;          // rad/s
  double base_fwhm = 0.0;        // rad/s
  double delta_omega_x = 0.0;    // rad/s
  double delta_omega_y = 0.0;    // rad/s
  double mean_phonons_x = 0.0;
  double mean_phonons_y = 0.0;
  double amplitude = 1.0;        // peak height of the unbroadened line
};

void validate(const LineshapeParams& params);

/// Smallest N with sum_{n <= N} p(n) > 1 - 1e-6 for a thermal distribution.
int thermal_truncation(double mean_phonon_number, double tolerance = 1e-6);

/// Unit-peak Lorentzian of full width `fwhm`.
double lorentzian(double detuning, double fwhm);

std::vector<double> thermal_lineshape(const LineshapeParams& params, const std::vector<double>& grid);

/// Occupation-weighted mean of the component positions (the line's first moment before
/// convolution with the Lorentzian, which has none of its own).
double component_centroid(const LineshapeParams& params);

/// FWHM of the highest peak in sampled data, from linearly interpolated half-height crossings.
/// Returns 0 if either crossing falls outside the grid.
double sampled_fwhm(const std::vector<double>& grid, const std::vector<double>& values);

struct DeltaOmegaFit {
  double delta_omega = 0.0;  // rad/s, shared by both radial modes
  double carrier = 0.0;      // rad/s
  double amplitude = 0.0;
  double residual = 0.0;     // Euclidean norm of the residual vector
  int iterations = 0;
};

/// Least-squares fit of (dw, carrier, A) with n̄_x, n̄_y and the base width held fixed.
/// Initialization: carrier at the maximum of the 3-point smoothed data, dw from the excess
/// width -(FWHM_obs - FWHM_base) / (n̄_x + n̄_y), A from the peak height. Throws NumericalError
/// when the optimizer does not converge.
DeltaOmegaFit fit_delta_omega(const std::vector<double>& grid, const std::vector<double>& values,
                              double mean_phonons_x, double mean_phonons_y, double base_fwhm);

}  // namespace rydion
