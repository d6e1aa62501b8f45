#include "golem/metrics.hpp"

#include <cstdio>
#include <vector>

#include <json.hpp>

#include "golem/errors.hpp"

namespace golem {
namespace {

void require_pair(const WeightedGraph& est, const WeightedGraph& truth, const char* op) {
  if (est.num_nodes() != truth.num_nodes()) {
    throw PreconditionError(std::string(op) + ": graphs have different sizes");
  }
  if (!is_dag(est) || !is_dag(truth)) {
    throw PreconditionError(std::string(op) + ": both graphs must be DAGs");
  }
}

// 0 none, 1 a->b, 2 b->a for a < b
int pair_mark(const WeightedGraph& g, int a, int b) {
  if (g.has_edge(a, b)) return 1;
  if (g.has_edge(b, a)) return 2;
  return 0;
}

// 0 none, 1 a->b, 2 b->a, 3 undirected for a < b
int pair_mark(const Cpdag& g, int a, int b) {
  if (g.undirected.count({a, b})) return 3;
  if (g.directed.count({a, b})) return 1;
  if (g.directed.count({b, a})) return 2;
  return 0;
}

std::vector<char> descendants(const WeightedGraph& g, int root) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int c : g.children(u)) {
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  seen[root] = 0;  // proper descendants only
  return seen;
}

}  // namespace

int shd(const WeightedGraph& est, const WeightedGraph& truth) {
  require_pair(est, truth, "shd");
  int count = 0;
  for (int a = 0; a < est.num_nodes(); ++a) {
    for (int b = a + 1; b < est.num_nodes(); ++b) {
      if (pair_mark(est, a, b) != pair_mark(truth, a, b)) ++count;
    }
  }
  return count;
}

int shd_cpdag(const WeightedGraph& est, const WeightedGraph& truth) {
  require_pair(est, truth, "shd_cpdag");
  const Cpdag ce = to_cpdag(est);
  const Cpdag ct = to_cpdag(truth);
  int count = 0;
  for (int a = 0; a < est.num_nodes(); ++a) {
    for (int b = a + 1; b < est.num_nodes(); ++b) {
      if (pair_mark(ce, a, b) != pair_mark(ct, a, b)) ++count;
    }
  }
  return count;
}

int sid(const WeightedGraph& est, const WeightedGraph& truth) {
  require_pair(est, truth, "sid");
  const int d = est.num_nodes();
  int count = 0;
  for (int i = 0; i < d; ++i) {
    const auto z = est.parents(i);
    std::vector<char> in_z(d, 0);
    for (int p : z) in_z[p] = 1;
    const auto desc = descendants(truth, i);

    // Backdoor graph: truth with i's outgoing edges removed.
    Matrix w = truth.weights();
    w.row(i).setZero();
    const WeightedGraph backdoor(std::move(w));

    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      bool correct;
      if (in_z[j]) {
        // Adjusting for j itself infers a null effect of i on j.
        correct = !desc[j];
      } else {
        correct = d_separated(backdoor, i, j, z);
      }
      if (!correct) ++count;
    }
  }
  return count;
}

double tpr(const WeightedGraph& est, const WeightedGraph& truth) {
  require_pair(est, truth, "tpr");
  const int total = truth.num_edges();
  if (total == 0) throw UndefinedMetricError("tpr: truth graph has no edges");
  int hit = 0;
  for (const Edge& e : truth.edges()) {
    if (est.has_edge(e.source, e.target)) ++hit;
  }
  return static_cast<double>(hit) / total;
}

MetricsReport compute_metrics(const WeightedGraph& est, const WeightedGraph& truth, double h_raw,
                              double wall_time_s) {
  require_pair(est, truth, "compute_metrics");
  const double d = truth.num_nodes();
  MetricsReport r;
  r.shd = shd(est, truth);
  r.shd_c = shd_cpdag(est, truth);
  r.sid = sid(est, truth);
  r.tpr = tpr(est, truth);
  r.shd_norm = r.shd / d;
  r.shd_c_norm = r.shd_c / d;
  r.sid_norm = r.sid / d;
  r.n_edges_est = est.num_edges();
  r.h_raw = h_raw;
  r.wall_time_s = wall_time_s;
  return r;
}

std::string metrics_to_json(const MetricsReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  j["shd"] = report.shd;
  j["shd_c"] = report.shd_c;
  j["sid"] = report.sid;
  j["tpr"] = report.tpr;
  j["shd_norm"] = report.shd_norm;
  j["shd_c_norm"] = report.shd_c_norm;
  j["sid_norm"] = report.sid_norm;
  j["n_edges_est"] = report.n_edges_est;
  j["h_raw"] = report.h_raw;
  if (include_timing) j["wall_time_s"] = report.wall_time_s;
  return j.dump(2) + "\n";
}

MetricsReport metrics_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metrics_from_json: ") + e.what());
  }
  MetricsReport r;
  try {
    r.shd = j.at("shd").get<int>();
    r.shd_c = j.at("shd_c").get<int>();
    r.sid = j.at("sid").get<int>();
    r.tpr = j.at("tpr").get<double>();
    r.shd_norm = j.at("shd_norm").get<double>();
    r.shd_c_norm = j.at("shd_c_norm").get<double>();
    r.sid_norm = j.at("sid_norm").get<double>();
    r.n_edges_est = j.at("n_edges_est").get<int>();
    r.h_raw = j.at("h_raw").get<double>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metrics_from_json: ") + e.what());
  }
  return r;
}

std::string metrics_csv_header() {
  return "shd,shd_c,sid,tpr,shd_norm,shd_c_norm,sid_norm,n_edges_est,h_raw,wall_time_s";
}

std::string metrics_csv_row(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g", r.shd, r.shd_c,
                r.sid, r.tpr, r.shd_norm, r.shd_c_norm, r.sid_norm, r.n_edges_est, r.h_raw,
                r.wall_time_s);
  return buf;
}

}  // namespace golem
