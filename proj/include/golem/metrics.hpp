#pragma once

#include <string>

#include "golem/graph.hpp"

namespace golem {

struct MetricsReport {
  int shd = 0;
  int shd_c = 0;
  int sid = 0;
  double tpr = 0.0;
  double shd_norm = 0.0;    // shd / d
  double shd_c_norm = 0.0;  // shd_c / d
  double sid_norm = 0.0;    // sid / d
  int n_edges_est = 0;
  double h_raw = 0.0;  // acyclicity penalty of the raw (pre-postproc) solution
  double wall_time_s = 0.0;
};

// Structural Hamming distance; a reversed pair costs 1, not 2.
int shd(const WeightedGraph& est, const WeightedGraph& truth);

// SHD between the CPDAGs of the two DAGs, mark mismatches cost 1.
int shd_cpdag(const WeightedGraph& est, const WeightedGraph& truth);

// Structural intervention distance: ordered pairs (i, j) whose effect is
// misjudged when the estimated parents of i are used as the adjustment set.
int sid(const WeightedGraph& est, const WeightedGraph& truth);

// Correctly oriented shared edges over the number of true edges.
double tpr(const WeightedGraph& est, const WeightedGraph& truth);

MetricsReport compute_metrics(const WeightedGraph& est, const WeightedGraph& truth,
                              double h_raw = 0.0, double wall_time_s = 0.0);

// include_timing keeps wall_time_s out of reports that must be byte-stable
// across reruns.
std::string metrics_to_json(const MetricsReport& report, bool include_timing = false);
MetricsReport metrics_from_json(const std::string& text);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

}  // namespace golem
