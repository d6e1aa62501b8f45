#include "golem/linalg.hpp"

#include <cmath>
#include <string>

#include "golem/errors.hpp"

namespace golem::linalg {
namespace {

void require_square_finite(const Matrix& a, const char* op) {
  if (a.rows() < 1 || a.rows() != a.cols()) {
    throw PreconditionError(std::string(op) + ": expected a nonempty square matrix");
  }
  if (!a.allFinite()) {
    throw PreconditionError(std::string(op) + ": input has non-finite entries");
  }
}

Eigen::PartialPivLU<Matrix> lu_nonsingular(const Matrix& a, const char* op) {
  Eigen::PartialPivLU<Matrix> lu(a);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(lu.matrixLU()(i, i)) < kSingularTol) {
      throw SingularMatrixError(std::string(op) + ": matrix is numerically singular");
    }
  }
  return lu;
}

}  // namespace

Matrix matrix_exp(const Matrix& a) {
  require_square_finite(a, "matrix_exp");
  const Eigen::Index d = a.rows();

  // 1-norm bound under which the order-13 approximant is accurate to eps.
  constexpr double kTheta13 = 5.371920351148152;
  static constexpr double kB[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  const Matrix as = a / std::ldexp(1.0, squarings);

  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix id = Matrix::Identity(d, d);
  const Matrix u =
      as * (a6 * (kB[13] * a6 + kB[11] * a4 + kB[9] * a2) + kB[7] * a6 +
            kB[5] * a4 + kB[3] * a2 + kB[1] * id);
  const Matrix v = a6 * (kB[12] * a6 + kB[10] * a4 + kB[8] * a2) + kB[6] * a6 +
                   kB[4] * a4 + kB[2] * a2 + kB[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;

  if (!r.allFinite()) {
    throw NumericOverflowError("matrix_exp: result exceeds double range");
  }
  return r;
}

double log_abs_det(const Matrix& a) {
  require_square_finite(a, "log_abs_det");
  const auto lu = lu_nonsingular(a, "log_abs_det");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    acc += std::log(std::abs(lu.matrixLU()(i, i)));
  }
  return acc;
}

Matrix inverse_transpose(const Matrix& a) {
  require_square_finite(a, "inverse_transpose");
  return lu_nonsingular(a, "inverse_transpose").inverse().transpose();
}

}  // namespace golem::linalg
