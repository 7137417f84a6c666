#pragma once

#include <vector>

#include "rydion/constants.hpp"
#include "rydion/eigensolver.hpp"

namespace rydion {

/// |level, k>: electronic level dressed with k quanta of the RF drive.
struct FloquetBasisState {
  std::size_t level = 0;
  int k = 0;
};

struct FloquetMatrix {
  Matrix matrix;
  std::vector<FloquetBasisState> states;

  [[nodiscard]] std::size_t index_of(std::size_t level, int k) const;
};

/// Floquet Hamiltonian of H(t) = static_h + drive cos(omega t), truncated to |k| <= k_max:
/// diagonal blocks static_h + k omega, blocks (k, k +- 1) equal to drive / 2.
FloquetMatrix floquet_hamiltonian(const Matrix& static_h, const Matrix& drive, double omega, int k_max);

struct FloquetLine {
  double quasi_energy = 0.0;  // rad/s
  double bright_weight = 0.0; // sum over bright levels of |<level, 0|psi>|^2
  Vector state;               // eigenvector in FloquetMatrix::states order
};

struct FloquetSpectrum {
  FloquetMatrix floquet;
  std::vector<FloquetLine> lines;  // main lines, ascending quasi-energy
  double convergence_shift = 0.0;  // max |lambda(k_max) - lambda(k_max - 1)| over main lines
  bool converged = false;
};

/// Eigenstates of the truncated Floquet matrix carrying at least `min_weight` on the bright
/// (laser-coupled) levels at k = 0. Convergence compares against the k_max - 1 truncation.
FloquetSpectrum floquet_main_lines(const Matrix& static_h, const Matrix& drive, double omega, int k_max,
                                   const std::vector<std::size_t>& bright_levels, double min_weight = 0.02,
                                   double convergence_tolerance = khz(10.0));

}  // namespace rydion
