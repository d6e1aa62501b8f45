#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "golem/errors.hpp"
#include "golem/scores.hpp"

namespace golem {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  int iterations = 100000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int log_every = 1000;  // trace checkpoint spacing; 0 logs first and last only
};

struct TracePoint {
  int iteration = 0;
  double total = 0.0;
  double data_term = 0.0;
  double l1_term = 0.0;
  double h = 0.0;
  double grad_max_norm = 0.0;
};

struct OptimTrace {
  std::vector<TracePoint> points;
  int total_iterations = 0;
  bool converged = true;  // false when a run stops without meeting its target
};

void save_trace_csv(const OptimTrace& trace, const std::string& path);

// Raised when an objective evaluation fails mid-run. Carries the trace up to
// the failing iteration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, OptimTrace trace)
      : Error(what), trace_(std::make_shared<OptimTrace>(std::move(trace))) {}
  const OptimTrace& trace() const { return *trace_; }

 private:
  std::shared_ptr<OptimTrace> trace_;
};

struct FitResult {
  WeightedGraph graph;
  OptimTrace trace;
};

// Unconstrained Adam on the chosen penalized score. Runs the full iteration
// budget; the returned graph is the raw (usually cyclic) final iterate.
FitResult fit_golem(const DataMatrix& x, const ScoreConfig& score_cfg,
                    const OptimizerConfig& opt_cfg = {},
                    const std::optional<Matrix>& init = std::nullopt);

// EV fit first, then an NV fit initialized at the EV solution. Each phase
// runs opt_cfg.iterations; the trace concatenates both phases.
FitResult fit_golem_nv_warmstart(const DataMatrix& x, const OptimizerConfig& opt_cfg = {});
FitResult fit_golem_nv_warmstart(const DataMatrix& x, const ScoreConfig& ev_cfg,
                                 const ScoreConfig& nv_cfg, const OptimizerConfig& opt_cfg);

struct AugLagConfig {
  double lambda1 = 0.1;
  double initial_rho = 1.0;
  double rho_multiplier = 10.0;
  double max_rho = 1e16;
  double progress_ratio = 0.25;  // rho grows unless h shrinks by this factor
  double alpha_init = 0.0;
  double h_tol = 1e-8;
  int subproblem_iterations = 5000;
  double subproblem_tolerance = 1e-6;  // gradient max-norm early stop, 0 disables
  int max_subproblems = 64;
};

// Augmented-Lagrangian least squares (NOTEARS). Subproblems run Adam with
// opt_cfg's rate and betas but cfg.subproblem_iterations steps. On a
// non-converged exit the best-h iterate is returned with converged = false.
FitResult fit_notears(const DataMatrix& x, const AugLagConfig& cfg = {},
                      const OptimizerConfig& opt_cfg = {});

}  // namespace golem
