#include "golem/optim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>

#include "golem/linalg.hpp"

namespace golem {
namespace {

// want_h is false only on iterations whose score will not be recorded, so the
// matrix exponential can be skipped when it does not feed the gradient.
using EvalFn = std::function<ScoreValue(const Matrix&, Matrix*, bool want_h)>;

void validate_opt(const OptimizerConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw PreconditionError("optimizer: learning_rate must be > 0");
  if (cfg.iterations < 1) throw PreconditionError("optimizer: iterations must be >= 1");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw PreconditionError("optimizer: betas must lie in [0, 1)");
  }
  if (!(cfg.epsilon > 0.0)) throw PreconditionError("optimizer: epsilon must be > 0");
  if (cfg.log_every < 0) throw PreconditionError("optimizer: log_every must be >= 0");
}

// Adam over b in place. Records iteration 0, every log_every-th iteration and
// the last one. grad_tol > 0 stops early once the gradient max-norm drops
// below it. Returns the trace with iterations offset by iter_offset.
OptimTrace adam_loop(Matrix& b, const EvalFn& eval, const OptimizerConfig& cfg, double grad_tol,
                     int iter_offset) {
  validate_opt(cfg);
  const Eigen::Index d = b.rows();
  Matrix m = Matrix::Zero(d, d);
  Matrix v = Matrix::Zero(d, d);
  Matrix grad(d, d);

  OptimTrace trace;
  auto record = [&](int t, const ScoreValue& s, double gmax) {
    trace.points.push_back({iter_offset + t, s.total, s.data_term, s.l1_term, s.dag_term, gmax});
  };

  // Errors from the initial evaluation mean bad input, not divergence.
  ScoreValue score = eval(b, &grad, true);
  double gmax = grad.cwiseAbs().maxCoeff();
  record(0, score, gmax);
  trace.total_iterations = 0;
  if (grad_tol > 0.0 && gmax < grad_tol) return trace;

  double beta1_t = 1.0;
  double beta2_t = 1.0;
  for (int t = 1; t <= cfg.iterations; ++t) {
    beta1_t *= cfg.beta1;
    beta2_t *= cfg.beta2;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    b.array() -= cfg.learning_rate * (m.array() / (1.0 - beta1_t)) /
                 ((v.array() / (1.0 - beta2_t)).sqrt() + cfg.epsilon);
    b.diagonal().setZero();
    trace.total_iterations = t;

    if (!b.allFinite()) {
      throw DivergenceError("fit diverged at iteration " + std::to_string(iter_offset + t) +
                                ": iterate became non-finite",
                            std::move(trace));
    }
    const bool log_now = t == cfg.iterations || (cfg.log_every > 0 && t % cfg.log_every == 0);
    try {
      score = eval(b, &grad, log_now || grad_tol > 0.0);
    } catch (const Error& e) {
      throw DivergenceError("fit diverged at iteration " + std::to_string(iter_offset + t) +
                                ": " + e.what(),
                            std::move(trace));
    }
    gmax = grad.cwiseAbs().maxCoeff();
    if (log_now) record(t, score, gmax);
    if (grad_tol > 0.0 && gmax < grad_tol) {
      if (!log_now) record(t, eval(b, &grad, true), gmax);
      return trace;
    }
  }
  return trace;
}

void validate_init(const Matrix& init, Eigen::Index d, const char* op) {
  if (init.rows() != d || init.cols() != d) {
    throw PreconditionError(std::string(op) + ": init must be d x d");
  }
  if (!init.allFinite()) throw PreconditionError(std::string(op) + ": init has non-finite entries");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (init(i, i) != 0.0) throw PreconditionError(std::string(op) + ": init diagonal must be zero");
  }
}

void append_trace(OptimTrace& dst, const OptimTrace& src) {
  dst.points.insert(dst.points.end(), src.points.begin(), src.points.end());
  dst.total_iterations += src.total_iterations;
  dst.converged = dst.converged && src.converged;
}

}  // namespace

void save_trace_csv(const OptimTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_trace_csv: cannot open " + path);
  out << "iteration,total,data_term,l1_term,h,grad_max_norm\n";
  char buf[160];
  for (const TracePoint& p : trace.points) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.iteration, p.total,
                  p.data_term, p.l1_term, p.h, p.grad_max_norm);
    out << buf;
  }
  if (!out) throw Error("save_trace_csv: write failed for " + path);
}

FitResult fit_golem(const DataMatrix& x, const ScoreConfig& score_cfg,
                    const OptimizerConfig& opt_cfg, const std::optional<Matrix>& init) {
  ScoreEvaluator evaluator(x, score_cfg);  // rejects uncentered data for likelihood variants
  const int d = evaluator.dim();
  Matrix b = Matrix::Zero(d, d);
  if (init) {
    validate_init(*init, d, "fit_golem");
    b = *init;
  }
  EvalFn eval = [&evaluator](const Matrix& m, Matrix* g, bool want_h) {
    return evaluator.value_and_gradient(m, g, want_h);
  };
  OptimTrace trace = adam_loop(b, eval, opt_cfg, 0.0, 0);
  return {WeightedGraph(std::move(b)), std::move(trace)};
}

FitResult fit_golem_nv_warmstart(const DataMatrix& x, const OptimizerConfig& opt_cfg) {
  return fit_golem_nv_warmstart(x, ScoreConfig::golem_ev(), ScoreConfig::golem_nv(), opt_cfg);
}

FitResult fit_golem_nv_warmstart(const DataMatrix& x, const ScoreConfig& ev_cfg,
                                 const ScoreConfig& nv_cfg, const OptimizerConfig& opt_cfg) {
  FitResult ev = fit_golem(x, ev_cfg, opt_cfg);
  FitResult nv = fit_golem(x, nv_cfg, opt_cfg, ev.graph.weights());
  OptimTrace trace = std::move(ev.trace);
  OptimTrace nv_trace = std::move(nv.trace);
  for (TracePoint& p : nv_trace.points) p.iteration += trace.total_iterations;
  append_trace(trace, nv_trace);
  return {std::move(nv.graph), std::move(trace)};
}

FitResult fit_notears(const DataMatrix& x, const AugLagConfig& cfg,
                      const OptimizerConfig& opt_cfg) {
  if (!(cfg.initial_rho >= 0.0) || !(cfg.rho_multiplier > 1.0) || !(cfg.max_rho > 0.0)) {
    throw PreconditionError("fit_notears: need initial_rho >= 0, rho_multiplier > 1, max_rho > 0");
  }
  if (!(cfg.progress_ratio > 0.0 && cfg.progress_ratio < 1.0)) {
    throw PreconditionError("fit_notears: progress_ratio must lie in (0, 1)");
  }
  if (cfg.subproblem_iterations < 1 || cfg.max_subproblems < 1) {
    throw PreconditionError("fit_notears: iteration budgets must be >= 1");
  }
  if (x.rows() >= 1 && x.cols() >= 1 && !(x.colwise().mean().cwiseAbs().maxCoeff() < 1e-6)) {
    throw PreconditionError("fit_notears: columns must be centered");
  }

  ScoreEvaluator evaluator(x, ScoreConfig::least_squares(cfg.lambda1));
  const int d = evaluator.dim();

  OptimizerConfig sub_cfg = opt_cfg;
  sub_cfg.iterations = cfg.subproblem_iterations;

  double rho = cfg.initial_rho;
  double alpha = cfg.alpha_init;
  double h_prev = std::numeric_limits<double>::infinity();
  double h = h_prev;

  Matrix b = Matrix::Zero(d, d);
  Matrix best_b = b;
  double best_h = std::numeric_limits<double>::infinity();

  OptimTrace trace;
  bool converged = false;
  for (int sub = 0; sub < cfg.max_subproblems; ++sub) {
    // Subproblem: least squares + lambda1 l1 + (rho/2) h^2 + alpha h.
    EvalFn eval = [&](const Matrix& m, Matrix* g, bool) {
      ScoreValue s = evaluator.value_and_gradient(m, g, false);
      const Matrix e = linalg::matrix_exp(m.cwiseProduct(m));
      s.dag_term = e.trace() - d;
      s.total = s.data_term + cfg.lambda1 * s.l1_term +
                0.5 * rho * s.dag_term * s.dag_term + alpha * s.dag_term;
      if (g) {
        *g += (rho * s.dag_term + alpha) * e.transpose().cwiseProduct(2.0 * m);
        g->diagonal().setZero();
      }
      return s;
    };
    OptimTrace sub_trace = adam_loop(b, eval, sub_cfg, cfg.subproblem_tolerance,
                                     trace.total_iterations);
    append_trace(trace, sub_trace);

    h = sub_trace.points.back().h;
    if (h < best_h) {
      best_h = h;
      best_b = b;
    }
    if (h < cfg.h_tol) {
      converged = true;
      break;
    }
    if (h > cfg.progress_ratio * h_prev) {
      rho *= cfg.rho_multiplier;
    } else {
      alpha += rho * h;
    }
    h_prev = h;
    if (rho > cfg.max_rho) break;
  }

  if (!converged) b = best_b;
  trace.converged = converged;
  return {WeightedGraph(std::move(b)), std::move(trace)};
}

}  // namespace golem
