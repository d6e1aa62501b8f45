#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "golem/graph.hpp"
#include "golem/metrics.hpp"
#include "golem/optim.hpp"
#include "golem/sem.hpp"

namespace golem {

enum class Method {
  GolemEV,
  GolemNV,
  GolemEVL1,     // l1 only, no acyclicity penalty
  GolemEVPlain,  // no penalties at all
  GolemNVL1,
  GolemNVPlain,
  NotearsL1,
  Notears,  // augmented Lagrangian without l1
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // ParseError on unknown names

struct NoiseConfig {
  NoiseKind kind = NoiseKind::GaussianEV;
  double sigma2 = 1.0;  // GaussianEV only
};

// Sparse per-method knob overrides; unset fields keep the method defaults.
struct MethodOverrides {
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> learning_rate;
  std::optional<int> iterations;
  std::optional<bool> warm_start;  // GOLEM-NV family; default true
  std::optional<double> initial_rho;
  std::optional<double> max_rho;
  std::optional<int> subproblem_iterations;
  std::optional<int> max_subproblems;
};

struct ExperimentConfig {
  GraphSpec graph;  // per-seed generator seed is derived, graph.seed is ignored
  NoiseConfig noise;
  int n = 1000;
  std::vector<Method> methods;
  std::map<Method, MethodOverrides> overrides;
  OptimizerConfig optimizer{.iterations = 10000};  // desk-scale default budget
  double omega = 0.3;
  int n_seeds = 12;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// Stream separation: the graph, the noise scales and the samples for a seed
// get independent generator seeds.
std::uint64_t seed_for(std::uint64_t base_seed, const std::string& component, std::int64_t s);

struct SeedMethodResult {
  Method method = Method::GolemEV;
  std::int64_t seed = 0;
  bool ok = false;
  std::string error;  // set when !ok
  std::string dir;    // relative to output_dir
  MetricsReport metrics;
  double wall_time_s = 0.0;
};

struct MetricAggregate {
  Method method = Method::GolemEV;
  std::string metric;
  double mean = 0.0;
  double std_error = 0.0;  // sample stderr, ddof 1; 0 for a single seed
  int count = 0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string real_data;   // set for run_real_data
  std::string real_truth;  // set for run_real_data
  bool partial = false;
  std::vector<SeedMethodResult> results;
  std::vector<MetricAggregate> aggregates;
};

std::vector<MetricAggregate> aggregate_metrics(const std::vector<SeedMethodResult>& results);

// Runs the full (method x seed) grid, persisting per-item artifacts under
// output_dir/<method>/seed_<s>/ and a record.json snapshot at the root.
// Worker count comes from GOLEM_WORKERS (default 1). Per-item failures are
// recorded and mark the record partial instead of aborting the run.
RunRecord run_experiment(const ExperimentConfig& cfg);

// Same artifact layout against a fixed dataset and truth edge list; one item
// per method.
RunRecord run_real_data(const std::string& data_csv, const std::string& truth_edge_list,
                        const std::vector<Method>& methods, const ExperimentConfig& cfg);

RunRecord load_run_record(const std::string& dir);  // verifies aggregates

// Writes plot-ready tables: long per-seed rows and per-method aggregates.
// format is "csv" or "json"; files go to out_dir.
void emit_tables(const RunRecord& record, const std::string& format, const std::string& out_dir);

}  // namespace golem
