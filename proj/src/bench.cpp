#include "golem/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "golem/errors.hpp"
#include "golem/postproc.hpp"
#include "golem/rng.hpp"

namespace fs = std::filesystem;

namespace golem {
namespace {

using njson = nlohmann::ordered_json;

constexpr std::pair<Method, const char*> kMethodTable[] = {
    {Method::GolemEV, "GOLEM-EV"},         {Method::GolemNV, "GOLEM-NV"},
    {Method::GolemEVL1, "GOLEM-EV-L1"},    {Method::GolemEVPlain, "GOLEM-EV-Plain"},
    {Method::GolemNVL1, "GOLEM-NV-L1"},    {Method::GolemNVPlain, "GOLEM-NV-Plain"},
    {Method::NotearsL1, "NOTEARS-L1"},     {Method::Notears, "NOTEARS"},
};

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::GaussianEV: return "gaussian_ev";
    case NoiseKind::GaussianNV: return "gaussian_nv";
    case NoiseKind::Exponential: return "exp";
    case NoiseKind::Gumbel: return "gumbel";
  }
  return "gaussian_ev";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian_ev") return NoiseKind::GaussianEV;
  if (name == "gaussian_nv") return NoiseKind::GaussianNV;
  if (name == "exp" || name == "exponential") return NoiseKind::Exponential;
  if (name == "gumbel") return NoiseKind::Gumbel;
  throw ParseError("unknown noise kind '" + name +
                   "' (expected gaussian_ev, gaussian_nv, exp or gumbel)");
}

// Metrics enumerated for aggregation and table emission.
struct MetricField {
  const char* name;
  double (*get)(const MetricsReport&);
};

constexpr MetricField kMetricFields[] = {
    {"shd", [](const MetricsReport& r) { return static_cast<double>(r.shd); }},
    {"shd_c", [](const MetricsReport& r) { return static_cast<double>(r.shd_c); }},
    {"sid", [](const MetricsReport& r) { return static_cast<double>(r.sid); }},
    {"tpr", [](const MetricsReport& r) { return r.tpr; }},
    {"shd_norm", [](const MetricsReport& r) { return r.shd_norm; }},
    {"shd_c_norm", [](const MetricsReport& r) { return r.shd_c_norm; }},
    {"sid_norm", [](const MetricsReport& r) { return r.sid_norm; }},
    {"n_edges_est", [](const MetricsReport& r) { return static_cast<double>(r.n_edges_est); }},
    {"h_raw", [](const MetricsReport& r) { return r.h_raw; }},
};

void check_keys(const njson& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ParseError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read_field(const njson& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const njson::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void read_optional(const njson& obj, const char* key, std::optional<T>& out,
                   const std::string& where) {
  if (!obj.contains(key)) return;
  T value{};
  read_field(obj, key, value, where);
  out = value;
}

njson config_json(const ExperimentConfig& cfg) {
  njson j;
  j["graph"] = {{"model", cfg.graph.model == GraphModel::ER ? "ER" : "SF"},
                {"num_nodes", cfg.graph.num_nodes},
                {"edges_per_node", cfg.graph.edges_per_node},
                {"weight_low", cfg.graph.weight_low},
                {"weight_high", cfg.graph.weight_high},
                {"weight_scale", cfg.graph.weight_scale}};
  j["noise"] = {{"kind", noise_kind_name(cfg.noise.kind)}, {"sigma2", cfg.noise.sigma2}};
  j["n"] = cfg.n;
  njson methods = njson::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  j["methods"] = std::move(methods);
  j["optimizer"] = {{"learning_rate", cfg.optimizer.learning_rate},
                    {"iterations", cfg.optimizer.iterations},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2},
                    {"epsilon", cfg.optimizer.epsilon},
                    {"log_every", cfg.optimizer.log_every}};
  j["omega"] = cfg.omega;
  j["n_seeds"] = cfg.n_seeds;
  j["base_seed"] = cfg.base_seed;
  j["output_dir"] = cfg.output_dir;
  if (!cfg.overrides.empty()) {
    njson o;
    for (const auto& [m, ov] : cfg.overrides) {
      njson mo = njson::object();
      if (ov.lambda1) mo["lambda1"] = *ov.lambda1;
      if (ov.lambda2) mo["lambda2"] = *ov.lambda2;
      if (ov.learning_rate) mo["learning_rate"] = *ov.learning_rate;
      if (ov.iterations) mo["iterations"] = *ov.iterations;
      if (ov.warm_start) mo["warm_start"] = *ov.warm_start;
      if (ov.initial_rho) mo["initial_rho"] = *ov.initial_rho;
      if (ov.max_rho) mo["max_rho"] = *ov.max_rho;
      if (ov.subproblem_iterations) mo["subproblem_iterations"] = *ov.subproblem_iterations;
      if (ov.max_subproblems) mo["max_subproblems"] = *ov.max_subproblems;
      o[method_name(m)] = std::move(mo);
    }
    j["overrides"] = std::move(o);
  }
  return j;
}

ExperimentConfig config_from_json_obj(const njson& j) {
  check_keys(j,
             {"graph", "noise", "n", "methods", "optimizer", "omega", "n_seeds", "base_seed",
              "output_dir", "overrides"},
             "config");
  ExperimentConfig cfg;

  if (j.contains("graph")) {
    const njson& g = j.at("graph");
    check_keys(g, {"model", "num_nodes", "edges_per_node", "weight_low", "weight_high",
                   "weight_scale"},
               "config.graph");
    std::string model = "ER";
    read_field(g, "model", model, "config.graph");
    if (model == "ER") {
      cfg.graph.model = GraphModel::ER;
    } else if (model == "SF") {
      cfg.graph.model = GraphModel::SF;
    } else {
      throw ParseError("config.graph.model: expected ER or SF, got '" + model + "'");
    }
    read_field(g, "num_nodes", cfg.graph.num_nodes, "config.graph");
    read_field(g, "edges_per_node", cfg.graph.edges_per_node, "config.graph");
    read_field(g, "weight_low", cfg.graph.weight_low, "config.graph");
    read_field(g, "weight_high", cfg.graph.weight_high, "config.graph");
    read_field(g, "weight_scale", cfg.graph.weight_scale, "config.graph");
  }
  if (j.contains("noise")) {
    const njson& n = j.at("noise");
    check_keys(n, {"kind", "sigma2"}, "config.noise");
    std::string kind = noise_kind_name(cfg.noise.kind);
    read_field(n, "kind", kind, "config.noise");
    cfg.noise.kind = noise_kind_from_name(kind);
    read_field(n, "sigma2", cfg.noise.sigma2, "config.noise");
  }
  read_field(j, "n", cfg.n, "config");
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) throw ParseError("config.methods: expected an array");
    for (const auto& name : j.at("methods")) {
      cfg.methods.push_back(method_from_name(name.get<std::string>()));
    }
  }
  if (j.contains("optimizer")) {
    const njson& o = j.at("optimizer");
    check_keys(o, {"learning_rate", "iterations", "beta1", "beta2", "epsilon", "log_every"},
               "config.optimizer");
    read_field(o, "learning_rate", cfg.optimizer.learning_rate, "config.optimizer");
    read_field(o, "iterations", cfg.optimizer.iterations, "config.optimizer");
    read_field(o, "beta1", cfg.optimizer.beta1, "config.optimizer");
    read_field(o, "beta2", cfg.optimizer.beta2, "config.optimizer");
    read_field(o, "epsilon", cfg.optimizer.epsilon, "config.optimizer");
    read_field(o, "log_every", cfg.optimizer.log_every, "config.optimizer");
  }
  read_field(j, "omega", cfg.omega, "config");
  read_field(j, "n_seeds", cfg.n_seeds, "config");
  read_field(j, "base_seed", cfg.base_seed, "config");
  read_field(j, "output_dir", cfg.output_dir, "config");
  if (j.contains("overrides")) {
    const njson& o = j.at("overrides");
    if (!o.is_object()) throw ParseError("config.overrides: expected an object");
    for (const auto& item : o.items()) {
      const Method m = method_from_name(item.key());
      const njson& mo = item.value();
      const std::string where = "config.overrides." + item.key();
      check_keys(mo,
                 {"lambda1", "lambda2", "learning_rate", "iterations", "warm_start", "initial_rho",
                  "max_rho", "subproblem_iterations", "max_subproblems"},
                 where);
      MethodOverrides ov;
      read_optional(mo, "lambda1", ov.lambda1, where);
      read_optional(mo, "lambda2", ov.lambda2, where);
      read_optional(mo, "learning_rate", ov.learning_rate, where);
      read_optional(mo, "iterations", ov.iterations, where);
      read_optional(mo, "warm_start", ov.warm_start, where);
      read_optional(mo, "initial_rho", ov.initial_rho, where);
      read_optional(mo, "max_rho", ov.max_rho, where);
      read_optional(mo, "subproblem_iterations", ov.subproblem_iterations, where);
      read_optional(mo, "max_subproblems", ov.max_subproblems, where);
      cfg.overrides[m] = ov;
    }
  }
  return cfg;
}

struct MethodPlan {
  bool notears = false;
  bool warm_start = false;
  ScoreConfig score;
  AugLagConfig auglag;
  OptimizerConfig opt;
};

MethodPlan method_plan(Method m, const ExperimentConfig& cfg) {
  MethodPlan p;
  p.opt = cfg.optimizer;
  switch (m) {
    case Method::GolemEV:
      p.score = ScoreConfig::golem_ev();
      break;
    case Method::GolemEVL1:
      p.score = ScoreConfig::golem_ev();
      p.score.lambda2 = 0.0;
      break;
    case Method::GolemEVPlain:
      p.score = ScoreConfig::golem_ev();
      p.score.lambda1 = 0.0;
      p.score.lambda2 = 0.0;
      break;
    case Method::GolemNV:
      p.score = ScoreConfig::golem_nv();
      p.warm_start = true;
      break;
    case Method::GolemNVL1:
      p.score = ScoreConfig::golem_nv();
      p.score.lambda2 = 0.0;
      p.warm_start = true;
      break;
    case Method::GolemNVPlain:
      p.score = ScoreConfig::golem_nv();
      p.score.lambda1 = 0.0;
      p.score.lambda2 = 0.0;
      p.warm_start = true;
      break;
    case Method::NotearsL1:
      p.notears = true;
      p.auglag.lambda1 = 0.1;
      break;
    case Method::Notears:
      p.notears = true;
      p.auglag.lambda1 = 0.0;
      break;
  }
  const auto it = cfg.overrides.find(m);
  if (it != cfg.overrides.end()) {
    const MethodOverrides& ov = it->second;
    if (ov.lambda1) (p.notears ? p.auglag.lambda1 : p.score.lambda1) = *ov.lambda1;
    if (ov.lambda2) p.score.lambda2 = *ov.lambda2;
    if (ov.learning_rate) p.opt.learning_rate = *ov.learning_rate;
    if (ov.iterations) p.opt.iterations = *ov.iterations;
    if (ov.warm_start) p.warm_start = *ov.warm_start;
    if (ov.initial_rho) p.auglag.initial_rho = *ov.initial_rho;
    if (ov.max_rho) p.auglag.max_rho = *ov.max_rho;
    if (ov.subproblem_iterations) p.auglag.subproblem_iterations = *ov.subproblem_iterations;
    if (ov.max_subproblems) p.auglag.max_subproblems = *ov.max_subproblems;
  }
  return p;
}

FitResult run_fit(const DataMatrix& x, const MethodPlan& plan) {
  if (plan.notears) return fit_notears(x, plan.auglag, plan.opt);
  if (plan.warm_start) {
    return fit_golem_nv_warmstart(x, ScoreConfig::golem_ev(), plan.score, plan.opt);
  }
  return fit_golem(x, plan.score, plan.opt);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

NoiseSpec make_noise(const NoiseConfig& nc, int d, std::uint64_t base, std::int64_t s) {
  switch (nc.kind) {
    case NoiseKind::GaussianEV: return NoiseSpec::gaussian_ev(d, nc.sigma2);
    case NoiseKind::GaussianNV: return NoiseSpec::gaussian_nv(d, seed_for(base, "sigma", s));
    case NoiseKind::Exponential: return NoiseSpec::exponential(d);
    case NoiseKind::Gumbel: return NoiseSpec::gumbel(d);
  }
  throw PreconditionError("make_noise: bad noise kind");
}

// Fit, post-process, score and persist a single finished work item.
void finish_item(SeedMethodResult& out, const fs::path& dir, const WeightedGraph& truth,
                 const FitResult& fit, double omega) {
  const double h_raw = dag_penalty(fit.graph);
  const WeightedGraph post = postprocess(fit.graph, {omega});
  out.metrics = compute_metrics(post, truth, h_raw, out.wall_time_s);
  save_matrix_csv(truth.weights(), (dir / "truth.csv").string());
  save_matrix_csv(fit.graph.weights(), (dir / "b_raw.csv").string());
  save_matrix_csv(post.weights(), (dir / "b_post.csv").string());
  save_trace_csv(fit.trace, (dir / "trace.csv").string());
  write_file(dir / "metrics.json", metrics_to_json(out.metrics, false));
  njson timing;
  timing["wall_time_s"] = out.wall_time_s;
  timing["converged"] = fit.trace.converged;
  timing["total_iterations"] = fit.trace.total_iterations;
  write_file(dir / "timing.json", timing.dump(2) + "\n");
}

SeedMethodResult run_sim_item(const ExperimentConfig& cfg, Method m, std::int64_t s) {
  SeedMethodResult out;
  out.method = m;
  out.seed = s;
  out.dir = method_name(m) + "/seed_" + std::to_string(s);
  try {
    const fs::path dir = fs::path(cfg.output_dir) / out.dir;
    fs::create_directories(dir);

    GraphSpec gs = cfg.graph;
    gs.seed = seed_for(cfg.base_seed, "graph", s);
    const WeightedGraph truth = generate_graph(gs);
    const NoiseSpec noise = make_noise(cfg.noise, gs.num_nodes, cfg.base_seed, s);
    DataMatrix x = sample(truth, noise, cfg.n, seed_for(cfg.base_seed, "data", s));
    center_columns(x);

    const MethodPlan plan = method_plan(m, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const FitResult fit = run_fit(x, plan);
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_item(out, dir, truth, fit, cfg.omega);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

int workers_from_env() {
  const char* env = std::getenv("GOLEM_WORKERS");
  if (!env) return 1;
  const int w = std::atoi(env);
  return w < 1 ? 1 : w;
}

void run_pool(std::vector<std::function<void()>>& items) {
  const int workers = std::min<int>(workers_from_env(), static_cast<int>(items.size()));
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= items.size()) return;
      items[k]();
    }
  };
  std::vector<std::thread> threads;
  for (int i = 1; i < workers; ++i) threads.emplace_back(drain);
  drain();
  for (auto& t : threads) t.join();
}

njson record_json(const RunRecord& rec) {
  njson j;
  j["schema"] = "golem-run-record/1";
  j["partial"] = rec.partial;
  if (!rec.real_data.empty()) {
    j["real_data"] = rec.real_data;
    j["real_truth"] = rec.real_truth;
  }
  j["config"] = config_json(rec.config);
  njson results = njson::array();
  for (const SeedMethodResult& r : rec.results) {
    njson row;
    row["method"] = method_name(r.method);
    row["seed"] = r.seed;
    row["ok"] = r.ok;
    row["dir"] = r.dir;
    if (r.ok) {
      row["wall_time_s"] = r.wall_time_s;
      row["metrics"] = njson::parse(metrics_to_json(r.metrics, false));
    } else {
      row["error"] = r.error;
    }
    results.push_back(std::move(row));
  }
  j["results"] = std::move(results);
  njson aggs = njson::array();
  for (const MetricAggregate& a : rec.aggregates) {
    aggs.push_back({{"method", method_name(a.method)},
                    {"metric", a.metric},
                    {"mean", a.mean},
                    {"stderr", a.std_error},
                    {"count", a.count}});
  }
  j["aggregates"] = std::move(aggs);
  return j;
}

RunRecord record_from_json(const njson& j, const std::string& where) {
  check_keys(j, {"schema", "partial", "real_data", "real_truth", "config", "results", "aggregates"},
             where);
  RunRecord rec;
  std::string schema;
  read_field(j, "schema", schema, where);
  if (schema != "golem-run-record/1") {
    throw ParseError(where + ": unsupported schema '" + schema + "'");
  }
  read_field(j, "partial", rec.partial, where);
  read_field(j, "real_data", rec.real_data, where);
  read_field(j, "real_truth", rec.real_truth, where);
  if (!j.contains("config")) throw ParseError(where + ": missing config");
  rec.config = config_from_json_obj(j.at("config"));
  if (j.contains("results")) {
    for (const njson& row : j.at("results")) {
      check_keys(row, {"method", "seed", "ok", "dir", "wall_time_s", "metrics", "error"},
                 where + ".results");
      SeedMethodResult r;
      std::string name;
      read_field(row, "method", name, where + ".results");
      r.method = method_from_name(name);
      read_field(row, "seed", r.seed, where + ".results");
      read_field(row, "ok", r.ok, where + ".results");
      read_field(row, "dir", r.dir, where + ".results");
      read_field(row, "wall_time_s", r.wall_time_s, where + ".results");
      read_field(row, "error", r.error, where + ".results");
      if (r.ok) {
        if (!row.contains("metrics")) throw ParseError(where + ".results: missing metrics");
        r.metrics = metrics_from_json(row.at("metrics").dump());
        r.metrics.wall_time_s = r.wall_time_s;
      }
      rec.results.push_back(std::move(r));
    }
  }
  if (j.contains("aggregates")) {
    for (const njson& row : j.at("aggregates")) {
      check_keys(row, {"method", "metric", "mean", "stderr", "count"}, where + ".aggregates");
      MetricAggregate a;
      std::string name;
      read_field(row, "method", name, where + ".aggregates");
      a.method = method_from_name(name);
      read_field(row, "metric", a.metric, where + ".aggregates");
      read_field(row, "mean", a.mean, where + ".aggregates");
      read_field(row, "stderr", a.std_error, where + ".aggregates");
      read_field(row, "count", a.count, where + ".aggregates");
      rec.aggregates.push_back(std::move(a));
    }
  }
  return rec;
}

RunRecord finalize_record(RunRecord rec) {
  rec.partial = false;
  for (const SeedMethodResult& r : rec.results) rec.partial = rec.partial || !r.ok;
  rec.aggregates = aggregate_metrics(rec.results);
  write_file(fs::path(rec.config.output_dir) / "record.json", record_json(rec).dump(2) + "\n");
  return rec;
}

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string method_name(Method m) {
  for (const auto& [method, name] : kMethodTable) {
    if (method == m) return name;
  }
  throw PreconditionError("method_name: bad method value");
}

Method method_from_name(const std::string& name) {
  for (const auto& [method, table_name] : kMethodTable) {
    if (name == table_name) return method;
  }
  std::string valid;
  for (const auto& [method, table_name] : kMethodTable) {
    (void)method;
    valid += valid.empty() ? table_name : std::string(", ") + table_name;
  }
  throw ParseError("unknown method '" + name + "' (expected one of: " + valid + ")");
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  njson j;
  try {
    j = njson::parse(text);
  } catch (const njson::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json_obj(j);
}

std::uint64_t seed_for(std::uint64_t base_seed, const std::string& component, std::int64_t s) {
  return derive_seed(base_seed, component, static_cast<std::uint64_t>(s));
}

std::vector<MetricAggregate> aggregate_metrics(const std::vector<SeedMethodResult>& results) {
  std::vector<Method> order;
  for (const SeedMethodResult& r : results) {
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  }
  std::vector<MetricAggregate> out;
  for (Method m : order) {
    std::vector<const MetricsReport*> rows;
    for (const SeedMethodResult& r : results) {
      if (r.method == m && r.ok) rows.push_back(&r.metrics);
    }
    if (rows.empty()) continue;
    for (const MetricField& f : kMetricFields) {
      MetricAggregate a;
      a.method = m;
      a.metric = f.name;
      a.count = static_cast<int>(rows.size());
      double sum = 0.0;
      for (const MetricsReport* r : rows) sum += f.get(*r);
      a.mean = sum / a.count;
      if (a.count > 1) {
        double ss = 0.0;
        for (const MetricsReport* r : rows) {
          const double dev = f.get(*r) - a.mean;
          ss += dev * dev;
        }
        a.std_error = std::sqrt(ss / (a.count - 1)) / std::sqrt(static_cast<double>(a.count));
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n_seeds < 1) throw PreconditionError("run_experiment: n_seeds must be >= 1");
  if (cfg.n < 1) throw PreconditionError("run_experiment: n must be >= 1");
  if (cfg.methods.empty()) throw PreconditionError("run_experiment: no methods configured");
  if (!(cfg.omega >= 0.0)) throw PreconditionError("run_experiment: omega must be >= 0");
  fs::create_directories(cfg.output_dir);

  RunRecord rec;
  rec.config = cfg;
  rec.results.resize(cfg.methods.size() * static_cast<std::size_t>(cfg.n_seeds));
  std::vector<std::function<void()>> items;
  items.reserve(rec.results.size());
  std::size_t slot = 0;
  for (Method m : cfg.methods) {
    for (int k = 0; k < cfg.n_seeds; ++k) {
      const std::int64_t s = static_cast<std::int64_t>(cfg.base_seed) + k;
      SeedMethodResult* dst = &rec.results[slot++];
      items.emplace_back([&cfg, m, s, dst] { *dst = run_sim_item(cfg, m, s); });
    }
  }
  run_pool(items);
  return finalize_record(std::move(rec));
}

RunRecord run_real_data(const std::string& data_csv, const std::string& truth_edge_list,
                        const std::vector<Method>& methods, const ExperimentConfig& base_cfg) {
  if (methods.empty()) throw PreconditionError("run_real_data: no methods given");
  DataMatrix x = load_data_csv(data_csv);
  const int d = static_cast<int>(x.cols());
  const WeightedGraph truth = load_edge_list(truth_edge_list, d);
  if (!is_dag(truth)) throw PreconditionError("run_real_data: truth graph has a cycle");
  center_columns(x);

  ExperimentConfig cfg = base_cfg;
  cfg.graph.num_nodes = d;
  cfg.n = static_cast<int>(x.rows());
  cfg.methods = methods;
  cfg.n_seeds = 1;
  fs::create_directories(cfg.output_dir);

  RunRecord rec;
  rec.config = cfg;
  rec.real_data = data_csv;
  rec.real_truth = truth_edge_list;
  rec.results.resize(methods.size());
  std::vector<std::function<void()>> items;
  items.reserve(methods.size());
  for (std::size_t k = 0; k < methods.size(); ++k) {
    SeedMethodResult* dst = &rec.results[k];
    const Method m = methods[k];
    items.emplace_back([&cfg, &x, &truth, m, dst] {
      SeedMethodResult out;
      out.method = m;
      out.seed = static_cast<std::int64_t>(cfg.base_seed);
      out.dir = method_name(m) + "/seed_" + std::to_string(out.seed);
      try {
        const fs::path dir = fs::path(cfg.output_dir) / out.dir;
        fs::create_directories(dir);
        const MethodPlan plan = method_plan(m, cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult fit = run_fit(x, plan);
        out.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        finish_item(out, dir, truth, fit, cfg.omega);
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
      *dst = std::move(out);
    });
  }
  run_pool(items);
  return finalize_record(std::move(rec));
}

RunRecord load_run_record(const std::string& dir) {
  const fs::path path = fs::path(dir) / "record.json";
  std::ifstream in(path);
  if (!in) throw ParseError("load_run_record: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  njson j;
  try {
    j = njson::parse(buf.str());
  } catch (const njson::exception& e) {
    throw ParseError("load_run_record: " + path.string() + ": " + e.what());
  }
  RunRecord rec = record_from_json(j, "record");

  const auto recomputed = aggregate_metrics(rec.results);
  if (recomputed.size() != rec.aggregates.size()) {
    throw ParseError("load_run_record: aggregate table does not match per-seed rows");
  }
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    const MetricAggregate& a = rec.aggregates[i];
    const MetricAggregate& b = recomputed[i];
    if (a.method != b.method || a.metric != b.metric || a.count != b.count ||
        std::abs(a.mean - b.mean) > 1e-9 || std::abs(a.std_error - b.std_error) > 1e-9) {
      throw ParseError("load_run_record: aggregate mismatch for " + method_name(a.method) + "/" +
                       a.metric);
    }
  }
  return rec;
}

void emit_tables(const RunRecord& record, const std::string& format, const std::string& out_dir) {
  if (format != "csv" && format != "json") {
    throw ParseError("emit_tables: format must be csv or json, got '" + format + "'");
  }
  fs::create_directories(out_dir);
  const ExperimentConfig& cfg = record.config;
  const bool real = !record.real_data.empty();
  const std::string graph_type =
      real ? "real" : (cfg.graph.model == GraphModel::ER ? "ER" : "SF");
  const std::string noise = real ? "none" : noise_kind_name(cfg.noise.kind);
  const int d = cfg.graph.num_nodes;

  struct LongRow {
    std::string method;
    std::int64_t seed;
    std::string metric;
    double value;
  };
  std::vector<LongRow> rows;
  for (const SeedMethodResult& r : record.results) {
    if (!r.ok) continue;
    for (const MetricField& f : kMetricFields) {
      rows.push_back({method_name(r.method), r.seed, f.name, f.get(r.metrics)});
    }
    rows.push_back({method_name(r.method), r.seed, "wall_time_s", r.wall_time_s});
  }

  if (format == "csv") {
    std::string text = "method,graph_type,d,noise,n,seed,metric,value\n";
    for (const LongRow& r : rows) {
      text += r.method + "," + graph_type + "," + std::to_string(d) + "," + noise + "," +
              std::to_string(cfg.n) + "," + std::to_string(r.seed) + "," + r.metric + "," +
              fmt_value(r.value) + "\n";
    }
    write_file(fs::path(out_dir) / "long.csv", text);

    text = "method,graph_type,d,noise,n,metric,mean,stderr,count,partial\n";
    for (const MetricAggregate& a : record.aggregates) {
      text += method_name(a.method) + "," + graph_type + "," + std::to_string(d) + "," + noise +
              "," + std::to_string(cfg.n) + "," + a.metric + "," + fmt_value(a.mean) + "," +
              fmt_value(a.std_error) + "," + std::to_string(a.count) + "," +
              (record.partial ? "true" : "false") + "\n";
    }
    write_file(fs::path(out_dir) / "aggregate.csv", text);
    return;
  }

  njson longj = njson::array();
  for (const LongRow& r : rows) {
    longj.push_back({{"method", r.method},
                     {"graph_type", graph_type},
                     {"d", d},
                     {"noise", noise},
                     {"n", cfg.n},
                     {"seed", r.seed},
                     {"metric", r.metric},
                     {"value", r.value}});
  }
  write_file(fs::path(out_dir) / "long.json", longj.dump(2) + "\n");

  njson aggj = njson::array();
  for (const MetricAggregate& a : record.aggregates) {
    aggj.push_back({{"method", method_name(a.method)},
                    {"graph_type", graph_type},
                    {"d", d},
                    {"noise", noise},
                    {"n", cfg.n},
                    {"metric", a.metric},
                    {"mean", a.mean},
                    {"stderr", a.std_error},
                    {"count", a.count},
                    {"partial", record.partial}});
  }
  write_file(fs::path(out_dir) / "aggregate.json", aggj.dump(2) + "\n");
}

}  // namespace golem
