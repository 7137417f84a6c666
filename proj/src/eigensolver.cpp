#include "rydion/eigensolver.hpp"

#include <algorithm>
#include <cmath>

#include "rydion/error.hpp"

namespace rydion {

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("hermiticity_defect: matrix is not square");
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

EigenDecomposition diagonalize(const Matrix& hermitian, double tolerance) {
  if (hermitian.rows() != hermitian.cols()) throw DomainError("diagonalize: matrix is not square");
  if (const double defect = hermiticity_defect(hermitian); defect > tolerance)
    throw NumericalError("diagonalize: input is not Hermitian (relative defect " + std::to_string(defect) + ")");

  // Symmetrize so round-off in the lower triangle does not leak into the result.
  const Matrix h = 0.5 * (hermitian + hermitian.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver did not converge");

  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index col = 0; col < out.vectors.cols(); ++col) {
    auto v = out.vectors.col(col);
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      // Small slack so nearly equal magnitudes resolve to the lowest index.
      if (std::abs(v(i)) > best * (1.0 + 1e-9)) {
        best = std::abs(v(i));
        pivot = i;
      }
    }
    if (best > 0) v *= std::conj(v(pivot)) / best;
  }
  return out;
}

}  // namespace rydion
