#include "rydion/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rydion/error.hpp"

namespace rydion {

std::size_t FloquetMatrix::index_of(std::size_t level, int k) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].level == level && states[i].k == k) return i;
  throw std::out_of_range("FloquetMatrix: state not in truncated basis");
}

FloquetMatrix floquet_hamiltonian(const Matrix& static_h, const Matrix& drive, double omega, int k_max) {
  if (k_max < 1) throw DomainError("floquet_hamiltonian: k_max must be at least 1");
  if (static_h.rows() != static_h.cols() || drive.rows() != static_h.rows() || drive.cols() != static_h.cols())
    throw DomainError("floquet_hamiltonian: dimension mismatch");
  const Eigen::Index n = static_h.rows();
  const int orders = 2 * k_max + 1;
  FloquetMatrix out;
  out.matrix = Matrix::Zero(n * orders, n * orders);
  out.states.reserve(static_cast<std::size_t>(n * orders));
  for (int block = 0; block < orders; ++block) {
    const int k = block - k_max;
    for (Eigen::Index i = 0; i < n; ++i) out.states.push_back({static_cast<std::size_t>(i), k});
    out.matrix.block(block * n, block * n, n, n) = static_h;
    out.matrix.block(block * n, block * n, n, n).diagonal().array() += k * omega;
    if (block + 1 < orders) {
      out.matrix.block((block + 1) * n, block * n, n, n) = 0.5 * drive;
      out.matrix.block(block * n, (block + 1) * n, n, n) = 0.5 * drive.adjoint();
    }
  }
  return out;
}

namespace {

std::vector<FloquetLine> main_lines(const FloquetMatrix& fm, const std::vector<std::size_t>& bright, double min_weight) {
  const auto eig = diagonalize(fm.matrix);
  std::vector<std::size_t> bright_rows;
  for (auto level : bright) bright_rows.push_back(fm.index_of(level, 0));
  std::vector<FloquetLine> lines;
  for (Eigen::Index col = 0; col < eig.vectors.cols(); ++col) {
    double weight = 0.0;
    for (auto r : bright_rows) weight += std::norm(eig.vectors(static_cast<Eigen::Index>(r), col));
    if (weight >= min_weight) lines.push_back({eig.values(col), weight, eig.vectors.col(col)});
  }
  return lines;  // ascending: eigenvalues are sorted
}

}  // namespace

FloquetSpectrum floquet_main_lines(const Matrix& static_h, const Matrix& drive, double omega, int k_max,
                                   const std::vector<std::size_t>& bright_levels, double min_weight,
                                   double convergence_tolerance) {
  FloquetSpectrum out;
  out.floquet = floquet_hamiltonian(static_h, drive, omega, k_max);
  out.lines = main_lines(out.floquet, bright_levels, min_weight);

  if (k_max >= 2) {
    const auto coarse = main_lines(floquet_hamiltonian(static_h, drive, omega, k_max - 1), bright_levels, min_weight);
    double shift = 0.0;
    for (const auto& line : out.lines) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& other : coarse) nearest = std::min(nearest, std::abs(other.quasi_energy - line.quasi_energy));
      shift = std::max(shift, nearest);
    }
    out.convergence_shift = shift;
    out.converged = coarse.size() == out.lines.size() && shift < convergence_tolerance;
  } else {
    out.convergence_shift = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace rydion
