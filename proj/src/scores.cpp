#include "golem/scores.hpp"

#include <cmath>
#include <string>

#include "golem/errors.hpp"

namespace golem {
namespace {

constexpr double kCenterTol = 1e-6;

void require_data(const WeightedGraph& b, const DataMatrix& x, const char* op) {
  if (x.rows() < 1 || x.cols() != b.num_nodes()) {
    throw PreconditionError(std::string(op) + ": data must be n x d with d matching the graph");
  }
  if (!x.allFinite()) {
    throw PreconditionError(std::string(op) + ": data has non-finite entries");
  }
}

void require_centered(const DataMatrix& x, const char* op) {
  const double worst = x.colwise().mean().cwiseAbs().maxCoeff();
  if (!(worst < kCenterTol)) {
    throw PreconditionError(std::string(op) + ": columns must be centered (max |mean| = " +
                            std::to_string(worst) + ")");
  }
}

void require_spd(const Matrix& sigma, const char* op) {
  if (sigma.rows() < 1 || sigma.rows() != sigma.cols() || !sigma.allFinite()) {
    throw PreconditionError(std::string(op) + ": covariance must be a finite square matrix");
  }
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw PreconditionError(std::string(op) + ": covariance must be symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError(std::string(op) + ": covariance must be positive definite");
  }
}

Matrix sign_matrix(const Matrix& b) {
  return b.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

}  // namespace

ScoreConfig ScoreConfig::golem_ev() { return {ScoreVariant::LikelihoodEV, 2e-2, 5.0}; }

ScoreConfig ScoreConfig::golem_nv() { return {ScoreVariant::LikelihoodNV, 2e-3, 5.0}; }

ScoreConfig ScoreConfig::least_squares(double lambda1) {
  return {ScoreVariant::LeastSquares, lambda1, 0.0};
}

double likelihood_ev(const WeightedGraph& b, const DataMatrix& x) {
  require_data(b, x, "likelihood_ev");
  const int d = b.num_nodes();
  const Matrix r = x - x * b.weights();
  const double s = r.squaredNorm();
  if (!(s > 0.0)) throw DegenerateResidualError("likelihood_ev: zero residual variance");
  const Matrix a = Matrix::Identity(d, d) - b.weights();
  return 0.5 * d * std::log(s) - linalg::log_abs_det(a);
}

double likelihood_nv(const WeightedGraph& b, const DataMatrix& x) {
  require_data(b, x, "likelihood_nv");
  const int d = b.num_nodes();
  const Matrix r = x - x * b.weights();
  double sum_logs = 0.0;
  for (int i = 0; i < d; ++i) {
    const double s = r.col(i).squaredNorm();
    if (!(s > 0.0)) {
      throw DegenerateResidualError("likelihood_nv: zero residual variance in column " +
                                    std::to_string(i));
    }
    sum_logs += std::log(s);
  }
  const Matrix a = Matrix::Identity(d, d) - b.weights();
  return 0.5 * sum_logs - linalg::log_abs_det(a);
}

double least_squares(const WeightedGraph& b, const DataMatrix& x) {
  require_data(b, x, "least_squares");
  const Matrix r = x - x * b.weights();
  return r.squaredNorm() / (2.0 * static_cast<double>(x.rows()));
}

double l1_penalty(const WeightedGraph& b) { return b.weights().cwiseAbs().sum(); }

double dag_penalty(const WeightedGraph& b) {
  const Matrix e = linalg::matrix_exp(b.weights().cwiseProduct(b.weights()));
  return e.trace() - static_cast<double>(b.num_nodes());
}

Matrix dag_penalty_gradient(const WeightedGraph& b) {
  const Matrix e = linalg::matrix_exp(b.weights().cwiseProduct(b.weights()));
  return e.transpose().cwiseProduct(2.0 * b.weights());
}

ScoreValue score(const WeightedGraph& b, const DataMatrix& x, const ScoreConfig& cfg) {
  require_data(b, x, "score");
  ScoreValue out;
  switch (cfg.variant) {
    case ScoreVariant::LikelihoodEV:
      require_centered(x, "score");
      out.data_term = likelihood_ev(b, x);
      break;
    case ScoreVariant::LikelihoodNV:
      require_centered(x, "score");
      out.data_term = likelihood_nv(b, x);
      break;
    case ScoreVariant::LeastSquares:
      out.data_term = least_squares(b, x);
      break;
  }
  out.l1_term = l1_penalty(b);
  out.dag_term = dag_penalty(b);
  out.total = out.data_term + cfg.lambda1 * out.l1_term + cfg.lambda2 * out.dag_term;
  return out;
}

Matrix score_gradient(const WeightedGraph& b, const DataMatrix& x, const ScoreConfig& cfg) {
  require_data(b, x, "score_gradient");
  const int d = b.num_nodes();
  const double n = static_cast<double>(x.rows());
  const Matrix r = x - x * b.weights();
  const Matrix xtr = x.transpose() * r;

  Matrix grad(d, d);
  switch (cfg.variant) {
    case ScoreVariant::LikelihoodEV: {
      require_centered(x, "score_gradient");
      const double s = r.squaredNorm();
      if (!(s > 0.0)) throw DegenerateResidualError("score_gradient: zero residual variance");
      const Matrix a = Matrix::Identity(d, d) - b.weights();
      grad = -(d / s) * xtr + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LikelihoodNV: {
      require_centered(x, "score_gradient");
      Vector inv_s(d);
      for (int i = 0; i < d; ++i) {
        const double s = r.col(i).squaredNorm();
        if (!(s > 0.0)) {
          throw DegenerateResidualError("score_gradient: zero residual variance in column " +
                                        std::to_string(i));
        }
        inv_s[i] = 1.0 / s;
      }
      const Matrix a = Matrix::Identity(d, d) - b.weights();
      grad = -xtr * inv_s.asDiagonal() + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LeastSquares:
      grad = -xtr / n;
      break;
  }
  grad += cfg.lambda1 * sign_matrix(b.weights());
  if (cfg.lambda2 != 0.0) grad += cfg.lambda2 * dag_penalty_gradient(b);
  grad.diagonal().setZero();
  return grad;
}

ScoreValue population_score(const WeightedGraph& b, const Matrix& sigma, const ScoreConfig& cfg) {
  require_spd(sigma, "population_score");
  const int d = b.num_nodes();
  if (sigma.rows() != d) {
    throw PreconditionError("population_score: covariance dimension does not match the graph");
  }
  const Matrix a = Matrix::Identity(d, d) - b.weights();
  const Matrix m = a.transpose() * sigma * a;

  ScoreValue out;
  switch (cfg.variant) {
    case ScoreVariant::LikelihoodEV: {
      const double s = m.trace();
      if (!(s > 0.0)) throw DegenerateResidualError("population_score: zero residual variance");
      out.data_term = 0.5 * d * std::log(s) - linalg::log_abs_det(a);
      break;
    }
    case ScoreVariant::LikelihoodNV: {
      double sum_logs = 0.0;
      for (int i = 0; i < d; ++i) {
        if (!(m(i, i) > 0.0)) {
          throw DegenerateResidualError("population_score: zero residual variance in column " +
                                        std::to_string(i));
        }
        sum_logs += std::log(m(i, i));
      }
      out.data_term = 0.5 * sum_logs - linalg::log_abs_det(a);
      break;
    }
    case ScoreVariant::LeastSquares:
      out.data_term = 0.5 * m.trace();
      break;
  }
  out.l1_term = l1_penalty(b);
  out.dag_term = dag_penalty(b);
  out.total = out.data_term + cfg.lambda1 * out.l1_term + cfg.lambda2 * out.dag_term;
  return out;
}

Matrix population_score_gradient(const WeightedGraph& b, const Matrix& sigma,
                                 const ScoreConfig& cfg) {
  require_spd(sigma, "population_score_gradient");
  const int d = b.num_nodes();
  if (sigma.rows() != d) {
    throw PreconditionError("population_score_gradient: covariance dimension mismatch");
  }
  const Matrix a = Matrix::Identity(d, d) - b.weights();
  const Matrix sa = sigma * a;

  Matrix grad(d, d);
  switch (cfg.variant) {
    case ScoreVariant::LikelihoodEV: {
      const double s = (a.transpose() * sa).trace();
      if (!(s > 0.0)) {
        throw DegenerateResidualError("population_score_gradient: zero residual variance");
      }
      grad = -(d / s) * sa + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LikelihoodNV: {
      const Matrix m = a.transpose() * sa;
      Vector inv_s(d);
      for (int i = 0; i < d; ++i) {
        if (!(m(i, i) > 0.0)) {
          throw DegenerateResidualError(
              "population_score_gradient: zero residual variance in column " + std::to_string(i));
        }
        inv_s[i] = 1.0 / m(i, i);
      }
      grad = -sa * inv_s.asDiagonal() + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LeastSquares:
      grad = -sa;
      break;
  }
  grad += cfg.lambda1 * sign_matrix(b.weights());
  if (cfg.lambda2 != 0.0) grad += cfg.lambda2 * dag_penalty_gradient(b);
  grad.diagonal().setZero();
  return grad;
}

ScoreEvaluator::ScoreEvaluator(const DataMatrix& x, const ScoreConfig& cfg)
    : cfg_(cfg), num_samples_(static_cast<int>(x.rows())) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw PreconditionError("ScoreEvaluator: data must be nonempty");
  }
  if (!x.allFinite()) throw PreconditionError("ScoreEvaluator: data has non-finite entries");
  if (cfg.variant != ScoreVariant::LeastSquares) require_centered(x, "ScoreEvaluator");
  gram_ = x.transpose() * x;
}

ScoreValue ScoreEvaluator::value(const Matrix& b) const {
  return value_and_gradient(b, nullptr);
}

Matrix ScoreEvaluator::gradient(const Matrix& b) const {
  Matrix grad;
  value_and_gradient(b, &grad, cfg_.lambda2 != 0.0);
  return grad;
}

ScoreValue ScoreEvaluator::value_and_gradient(const Matrix& b, Matrix* grad, bool with_h) const {
  const int d = dim();
  if (b.rows() != d || b.cols() != d) {
    throw PreconditionError("ScoreEvaluator: matrix dimension does not match the data");
  }
  const double n = static_cast<double>(num_samples_);
  const Matrix a = Matrix::Identity(d, d) - b;
  const Matrix ga = gram_ * a;  // X'R

  ScoreValue out;
  switch (cfg_.variant) {
    case ScoreVariant::LikelihoodEV: {
      const double s = (a.transpose() * ga).trace();
      if (!(s > 0.0)) throw DegenerateResidualError("ScoreEvaluator: zero residual variance");
      out.data_term = 0.5 * d * std::log(s) - linalg::log_abs_det(a);
      if (grad) *grad = -(d / s) * ga + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LikelihoodNV: {
      const Vector s = (a.transpose() * ga).diagonal();
      Vector inv_s(d);
      for (int i = 0; i < d; ++i) {
        if (!(s[i] > 0.0)) {
          throw DegenerateResidualError("ScoreEvaluator: zero residual variance in column " +
                                        std::to_string(i));
        }
        inv_s[i] = 1.0 / s[i];
      }
      out.data_term = 0.5 * s.array().log().sum() - linalg::log_abs_det(a);
      if (grad) *grad = -ga * inv_s.asDiagonal() + linalg::inverse_transpose(a);
      break;
    }
    case ScoreVariant::LeastSquares: {
      out.data_term = (a.transpose() * ga).trace() / (2.0 * n);
      if (grad) *grad = -ga / n;
      break;
    }
  }

  const Matrix abs_b = b.cwiseAbs();
  out.l1_term = abs_b.sum() - abs_b.diagonal().sum();
  if (cfg_.lambda2 != 0.0 || with_h) {
    const Matrix e = linalg::matrix_exp(b.cwiseProduct(b));
    out.dag_term = e.trace() - d;
    if (grad && cfg_.lambda2 != 0.0) {
      *grad += cfg_.lambda2 * e.transpose().cwiseProduct(2.0 * b);
    }
  }
  out.total = out.data_term + cfg_.lambda1 * out.l1_term + cfg_.lambda2 * out.dag_term;
  if (grad) {
    *grad += cfg_.lambda1 * sign_matrix(b);
    grad->diagonal().setZero();
  }
  return out;
}

}  // namespace golem
