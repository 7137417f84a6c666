#pragma once

#include <Eigen/Dense>

namespace rydion {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // columns, orthonormal
};

/// Hermitian eigendecomposition with a deterministic gauge: in each eigenvector the
/// largest-magnitude component (lowest index on ties) is real and positive.
/// Throws NumericalError when ||H - H^dagger|| exceeds tolerance * max(1, ||H||).
EigenDecomposition diagonalize(const Matrix& hermitian, double tolerance = 1e-10);

/// Frobenius norm of H - H^dagger relative to max(1, ||H||).
double hermiticity_defect(const Matrix& m);

}  // namespace rydion
