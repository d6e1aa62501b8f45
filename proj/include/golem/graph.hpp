#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "golem/linalg.hpp"

namespace golem {

struct Edge {
  int source = 0;
  int target = 0;
  double weight = 0.0;
};

// Weighted adjacency with zero diagonal; weights(j, i) != 0 <=> edge X_j -> X_i,
// i.e. column i holds the coefficients of node i's parents.
class WeightedGraph {
 public:
  explicit WeightedGraph(Matrix weights);
  static WeightedGraph zero(int num_nodes);

  int num_nodes() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double weight(int source, int target) const { return weights_(source, target); }
  bool has_edge(int source, int target) const { return weights_(source, target) != 0.0; }
  int num_edges() const;
  std::vector<Edge> edges() const;           // (source, target) lexicographic
  std::vector<int> parents(int node) const;  // ascending
  std::vector<int> children(int node) const;
  void set_weight(int source, int target, double value);  // rejects the diagonal

 private:
  Matrix weights_;
};

enum class GraphModel { ER, SF };

struct GraphSpec {
  GraphModel model = GraphModel::ER;
  int num_nodes = 1;
  // k: ER draws ~k*d edges in expectation; SF attaches k edges per arrival.
  double edges_per_node = 1.0;
  double weight_low = 0.5;
  double weight_high = 2.0;
  double weight_scale = 1.0;
  std::uint64_t seed = 0;
};

WeightedGraph generate_er(const GraphSpec& spec);
WeightedGraph generate_sf(const GraphSpec& spec);
WeightedGraph generate_graph(const GraphSpec& spec);

bool is_dag(const WeightedGraph& g);
// Kahn order of the nonzero pattern; PreconditionError on cycles.
std::vector<int> topological_order(const WeightedGraph& g);

// Markov equivalence class representative: compelled edges directed, the rest
// undirected (stored with first < second).
struct Cpdag {
  int num_nodes = 0;
  std::set<std::pair<int, int>> directed;
  std::set<std::pair<int, int>> undirected;
};

Cpdag to_cpdag(const WeightedGraph& g);

// Standard d-separation of a and b given z, via Bayes-ball reachability.
bool d_separated(const WeightedGraph& g, int a, int b, const std::vector<int>& given);

// CSV formats: edge list "source,target,weight" (0-indexed, header row) and a
// plain full matrix, one row per line.
void save_edge_list(const WeightedGraph& g, const std::string& path);
// num_nodes = -1 infers 1 + max node index from the file.
WeightedGraph load_edge_list(const std::string& path, int num_nodes = -1);
void save_matrix_csv(const Matrix& m, const std::string& path);
Matrix load_matrix_csv(const std::string& path);

}  // namespace golem
