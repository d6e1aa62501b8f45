#pragma once

#include "golem/graph.hpp"
#include "golem/linalg.hpp"
#include "golem/sem.hpp"

namespace golem {

enum class ScoreVariant { LikelihoodEV, LikelihoodNV, LeastSquares };

struct ScoreConfig {
  ScoreVariant variant = ScoreVariant::LikelihoodEV;
  double lambda1 = 0.0;  // weight on the off-diagonal l1 norm
  double lambda2 = 0.0;  // weight on the acyclicity penalty

  static ScoreConfig golem_ev();  // likelihood-EV, lambda1 2e-2, lambda2 5
  static ScoreConfig golem_nv();  // likelihood-NV, lambda1 2e-3, lambda2 5
  static ScoreConfig least_squares(double lambda1 = 0.0);
};

struct ScoreValue {
  double total = 0.0;      // data_term + lambda1 * l1_term + lambda2 * dag_term
  double data_term = 0.0;  // likelihood or least-squares part
  double l1_term = 0.0;    // ||B||_1 off the diagonal, unweighted
  double dag_term = 0.0;   // tr exp(B o B) - d, unweighted
};

// Raw score terms. These do not require centered data; the composite
// score()/score_gradient() below do for the likelihood variants.
double likelihood_ev(const WeightedGraph& b, const DataMatrix& x);
double likelihood_nv(const WeightedGraph& b, const DataMatrix& x);
double least_squares(const WeightedGraph& b, const DataMatrix& x);
double l1_penalty(const WeightedGraph& b);
double dag_penalty(const WeightedGraph& b);
Matrix dag_penalty_gradient(const WeightedGraph& b);

ScoreValue score(const WeightedGraph& b, const DataMatrix& x, const ScoreConfig& cfg);
Matrix score_gradient(const WeightedGraph& b, const DataMatrix& x, const ScoreConfig& cfg);

// Same objectives with the empirical covariance replaced by a given SPD
// covariance; this is the n -> infinity limit up to an additive constant.
ScoreValue population_score(const WeightedGraph& b, const Matrix& sigma, const ScoreConfig& cfg);
Matrix population_score_gradient(const WeightedGraph& b, const Matrix& sigma,
                                 const ScoreConfig& cfg);

// Shared state for repeated score evaluations on fixed data. Precomputes the
// Gram matrix X'X once so each evaluation costs O(d^3) regardless of n.
class ScoreEvaluator {
 public:
  ScoreEvaluator(const DataMatrix& x, const ScoreConfig& cfg);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const ScoreConfig& config() const { return cfg_; }

  ScoreValue value(const Matrix& b) const;
  Matrix gradient(const Matrix& b) const;
  // with_h controls whether the acyclicity term is computed when lambda2 is
  // zero and it would only be reported, not optimized.
  ScoreValue value_and_gradient(const Matrix& b, Matrix* grad, bool with_h = true) const;

 private:
  ScoreConfig cfg_;
  int num_samples_;
  Matrix gram_;
};

}  // namespace golem
