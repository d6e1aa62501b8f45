#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>

#include "golem/bench.hpp"
#include "golem/metrics.hpp"
#include "golem/optim.hpp"
#include "golem/postproc.hpp"
#include "golem/scores.hpp"
#include "golem/sem.hpp"

namespace py = pybind11;
using golem::Matrix;

namespace {

golem::ScoreVariant variant_from_name(const std::string& name) {
  if (name == "ev") return golem::ScoreVariant::LikelihoodEV;
  if (name == "nv") return golem::ScoreVariant::LikelihoodNV;
  if (name == "ls") return golem::ScoreVariant::LeastSquares;
  throw golem::ParseError("unknown score variant '" + name + "' (expected ev, nv or ls)");
}

golem::ScoreConfig make_score_config(const std::string& variant, std::optional<double> lambda1,
                                     std::optional<double> lambda2) {
  golem::ScoreConfig cfg;
  cfg.variant = variant_from_name(variant);
  // default penalties follow the method family of the variant
  if (cfg.variant == golem::ScoreVariant::LikelihoodEV) cfg = golem::ScoreConfig::golem_ev();
  if (cfg.variant == golem::ScoreVariant::LikelihoodNV) cfg = golem::ScoreConfig::golem_nv();
  if (lambda1) cfg.lambda1 = *lambda1;
  if (lambda2) cfg.lambda2 = *lambda2;
  return cfg;
}

golem::NoiseSpec make_noise_spec(const std::string& kind, int d, double sigma2,
                                 std::uint64_t sigma_seed) {
  if (kind == "gaussian_ev") return golem::NoiseSpec::gaussian_ev(d, sigma2);
  if (kind == "gaussian_nv") return golem::NoiseSpec::gaussian_nv(d, sigma_seed);
  if (kind == "exp" || kind == "exponential") return golem::NoiseSpec::exponential(d);
  if (kind == "gumbel") return golem::NoiseSpec::gumbel(d);
  throw golem::ParseError("unknown noise kind '" + kind + "'");
}

py::dict trace_to_dict(const golem::OptimTrace& trace) {
  py::list iteration, total, data_term, l1_term, h, grad_max_norm;
  for (const golem::TracePoint& p : trace.points) {
    iteration.append(p.iteration);
    total.append(p.total);
    data_term.append(p.data_term);
    l1_term.append(p.l1_term);
    h.append(p.h);
    grad_max_norm.append(p.grad_max_norm);
  }
  py::dict out;
  out["iteration"] = iteration;
  out["total"] = total;
  out["data_term"] = data_term;
  out["l1_term"] = l1_term;
  out["h"] = h;
  out["grad_max_norm"] = grad_max_norm;
  out["total_iterations"] = trace.total_iterations;
  out["converged"] = trace.converged;
  return out;
}

py::dict report_to_dict(const golem::MetricsReport& r) {
  py::dict out;
  out["shd"] = r.shd;
  out["shd_c"] = r.shd_c;
  out["sid"] = r.sid;
  out["tpr"] = r.tpr;
  out["shd_norm"] = r.shd_norm;
  out["shd_c_norm"] = r.shd_c_norm;
  out["sid_norm"] = r.sid_norm;
  out["n_edges_est"] = r.n_edges_est;
  out["h_raw"] = r.h_raw;
  return out;
}

golem::OptimizerConfig make_opt(double learning_rate, int iterations) {
  golem::OptimizerConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.iterations = iterations;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear DAG structure learning: penalized likelihood scores, Adam fits, metrics";

  m.def(
      "generate_graph",
      [](const std::string& model, int num_nodes, double edges_per_node, std::uint64_t seed,
         double weight_low, double weight_high, double weight_scale) {
        golem::GraphSpec spec;
        if (model == "ER") {
          spec.model = golem::GraphModel::ER;
        } else if (model == "SF") {
          spec.model = golem::GraphModel::SF;
        } else {
          throw golem::ParseError("model must be ER or SF");
        }
        spec.num_nodes = num_nodes;
        spec.edges_per_node = edges_per_node;
        spec.seed = seed;
        spec.weight_low = weight_low;
        spec.weight_high = weight_high;
        spec.weight_scale = weight_scale;
        return golem::generate_graph(spec).weights();
      },
      py::arg("model"), py::arg("num_nodes"), py::arg("edges_per_node") = 1.0,
      py::arg("seed") = 0, py::arg("weight_low") = 0.5, py::arg("weight_high") = 2.0,
      py::arg("weight_scale") = 1.0, "Weighted adjacency of a random DAG; entry (j, i) is j -> i");

  m.def(
      "sample",
      [](const Matrix& b, int n, std::uint64_t seed, const std::string& noise, double sigma2,
         std::uint64_t sigma_seed) {
        const golem::WeightedGraph g(b);
        return golem::sample(g, make_noise_spec(noise, g.num_nodes(), sigma2, sigma_seed), n,
                             seed);
      },
      py::arg("b"), py::arg("n"), py::arg("seed") = 0, py::arg("noise") = "gaussian_ev",
      py::arg("sigma2") = 1.0, py::arg("sigma_seed") = 0,
      "Draw n rows from the linear SEM with the given noise kind");

  m.def(
      "center_columns",
      [](Matrix x) {
        golem::center_columns(x);
        return x;
      },
      py::arg("x"));

  m.def("is_dag", [](const Matrix& b) { return golem::is_dag(golem::WeightedGraph(b)); },
        py::arg("b"));

  m.def("dag_penalty",
        [](const Matrix& b) { return golem::dag_penalty(golem::WeightedGraph(b)); }, py::arg("b"));

  m.def(
      "score",
      [](const Matrix& b, const Matrix& x, const std::string& variant,
         std::optional<double> lambda1, std::optional<double> lambda2) {
        const golem::ScoreValue s =
            golem::score(golem::WeightedGraph(b), x, make_score_config(variant, lambda1, lambda2));
        py::dict out;
        out["total"] = s.total;
        out["data_term"] = s.data_term;
        out["l1_term"] = s.l1_term;
        out["dag_term"] = s.dag_term;
        return out;
      },
      py::arg("b"), py::arg("x"), py::arg("variant") = "ev", py::arg("lambda1") = py::none(),
      py::arg("lambda2") = py::none());

  m.def(
      "score_gradient",
      [](const Matrix& b, const Matrix& x, const std::string& variant,
         std::optional<double> lambda1, std::optional<double> lambda2) {
        return golem::score_gradient(golem::WeightedGraph(b), x,
                                     make_score_config(variant, lambda1, lambda2));
      },
      py::arg("b"), py::arg("x"), py::arg("variant") = "ev", py::arg("lambda1") = py::none(),
      py::arg("lambda2") = py::none());

  m.def(
      "fit_golem",
      [](const Matrix& x, const std::string& variant, std::optional<double> lambda1,
         std::optional<double> lambda2, double learning_rate, int iterations,
         std::optional<Matrix> init) {
        const golem::FitResult fit =
            golem::fit_golem(x, make_score_config(variant, lambda1, lambda2),
                             make_opt(learning_rate, iterations), init);
        return py::make_tuple(fit.graph.weights(), trace_to_dict(fit.trace));
      },
      py::arg("x"), py::arg("variant") = "ev", py::arg("lambda1") = py::none(),
      py::arg("lambda2") = py::none(), py::arg("learning_rate") = 1e-3,
      py::arg("iterations") = 10000, py::arg("init") = py::none(),
      "Adam on the penalized score; returns (raw B, trace dict)");

  m.def(
      "fit_golem_nv_warmstart",
      [](const Matrix& x, double learning_rate, int iterations) {
        const golem::FitResult fit =
            golem::fit_golem_nv_warmstart(x, make_opt(learning_rate, iterations));
        return py::make_tuple(fit.graph.weights(), trace_to_dict(fit.trace));
      },
      py::arg("x"), py::arg("learning_rate") = 1e-3, py::arg("iterations") = 10000);

  m.def(
      "fit_notears",
      [](const Matrix& x, double lambda1, int subproblem_iterations, int max_subproblems,
         double learning_rate) {
        golem::AugLagConfig cfg;
        cfg.lambda1 = lambda1;
        cfg.subproblem_iterations = subproblem_iterations;
        cfg.max_subproblems = max_subproblems;
        golem::OptimizerConfig opt;
        opt.learning_rate = learning_rate;
        const golem::FitResult fit = golem::fit_notears(x, cfg, opt);
        return py::make_tuple(fit.graph.weights(), trace_to_dict(fit.trace));
      },
      py::arg("x"), py::arg("lambda1") = 0.1, py::arg("subproblem_iterations") = 5000,
      py::arg("max_subproblems") = 64, py::arg("learning_rate") = 1e-3,
      "Augmented-Lagrangian least squares; returns (B, trace dict)");

  m.def(
      "threshold",
      [](const Matrix& b, double omega) {
        return golem::threshold(golem::WeightedGraph(b), {omega}).weights();
      },
      py::arg("b"), py::arg("omega") = 0.3);

  m.def("dagify",
        [](const Matrix& b) { return golem::dagify(golem::WeightedGraph(b)).weights(); },
        py::arg("b"));

  m.def(
      "postprocess",
      [](const Matrix& b, double omega) {
        return golem::postprocess(golem::WeightedGraph(b), {omega}).weights();
      },
      py::arg("b"), py::arg("omega") = 0.3);

  m.def(
      "metrics",
      [](const Matrix& est, const Matrix& truth) {
        return report_to_dict(
            golem::compute_metrics(golem::WeightedGraph(est), golem::WeightedGraph(truth)));
      },
      py::arg("est"), py::arg("truth"),
      "shd / shd_c / sid / tpr and node-normalized variants, est vs truth");

  py::register_exception<golem::Error>(m, "GolemError");
}
