#pragma once

#include <Eigen/Dense>

namespace golem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

// Pivot magnitudes below this count as exact singularity.
inline constexpr double kSingularTol = 1e-12;

// e^a by scaling-and-squaring with a fixed order-13 Pade approximant.
// Throws NumericOverflowError when the result leaves double range.
Matrix matrix_exp(const Matrix& a);

// log|det(a)| as the sum of log|pivots| of a partial-pivot LU.
// Throws SingularMatrixError when a pivot falls below kSingularTol.
double log_abs_det(const Matrix& a);

// (a^{-1})^T, same singularity contract as log_abs_det.
Matrix inverse_transpose(const Matrix& a);

}  // namespace linalg
}  // namespace golem
