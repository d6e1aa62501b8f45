#include "golem/postproc.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "golem/errors.hpp"

namespace golem {
namespace {

// Kosaraju strongly connected components on the nonzero pattern of w.
std::vector<int> scc_ids(const Matrix& w) {
  const int d = static_cast<int>(w.rows());
  std::vector<int> order;
  order.reserve(d);
  std::vector<char> seen(d, 0);
  for (int s = 0; s < d; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    std::vector<std::pair<int, int>> stack{{s, 0}};
    while (!stack.empty()) {
      const auto [u, i] = stack.back();
      if (i < d) {
        ++stack.back().second;
        if (w(u, i) != 0.0 && !seen[i]) {
          seen[i] = 1;
          stack.emplace_back(i, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  std::vector<int> id(d, -1);
  int next = 0;
  for (int k = d - 1; k >= 0; --k) {
    const int s = order[k];
    if (id[s] != -1) continue;
    id[s] = next;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < d; ++v) {
        if (w(v, u) != 0.0 && id[v] == -1) {  // edge v -> u, walked backwards
          id[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return id;
}

}  // namespace

WeightedGraph threshold(const WeightedGraph& b, const PostprocConfig& cfg) {
  if (!(cfg.omega >= 0.0)) throw PreconditionError("threshold: omega must be >= 0");
  Matrix w = b.weights();
  for (Eigen::Index s = 0; s < w.rows(); ++s) {
    for (Eigen::Index t = 0; t < w.cols(); ++t) {
      if (std::abs(w(s, t)) < cfg.omega) w(s, t) = 0.0;
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph dagify(const WeightedGraph& b) {
  Matrix w = b.weights();
  const int d = static_cast<int>(w.rows());
  while (true) {
    // An edge lies on a directed cycle iff both ends share a strong component.
    const auto id = scc_ids(w);
    int best_s = -1;
    int best_t = -1;
    double best_w = 0.0;
    for (int s = 0; s < d; ++s) {
      for (int t = 0; t < d; ++t) {
        if (w(s, t) == 0.0 || id[s] != id[t]) continue;
        if (best_s == -1 || std::abs(w(s, t)) < best_w) {
          best_s = s;
          best_t = t;
          best_w = std::abs(w(s, t));
        }
      }
    }
    if (best_s == -1) break;
    w(best_s, best_t) = 0.0;
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph postprocess(const WeightedGraph& b, const PostprocConfig& cfg) {
  return dagify(threshold(b, cfg));
}

}  // namespace golem
