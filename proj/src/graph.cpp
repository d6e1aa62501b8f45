#include "golem/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "golem/errors.hpp"
#include "golem/rng.hpp"

namespace golem {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double draw_weight(Rng& rng, const GraphSpec& spec) {
  const double magnitude = rng.uniform(spec.weight_low, spec.weight_high);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return spec.weight_scale * sign * magnitude;
}

void validate_spec(const GraphSpec& spec, GraphModel expected, const char* op) {
  if (spec.model != expected) {
    throw PreconditionError(std::string(op) + ": spec built for a different graph model");
  }
  if (spec.num_nodes < 1) {
    throw PreconditionError(std::string(op) + ": num_nodes must be >= 1");
  }
  if (!(spec.weight_low > 0.0) || !(spec.weight_high > spec.weight_low)) {
    throw PreconditionError(std::string(op) + ": need 0 < weight_low < weight_high");
  }
  if (spec.edges_per_node < 1.0) {
    throw PreconditionError(std::string(op) + ": edges_per_node must be >= 1");
  }
  if (!(spec.weight_scale > 0.0)) {
    throw PreconditionError(std::string(op) + ": weight_scale must be > 0");
  }
}

std::vector<int> try_topological(const Matrix& w, bool* ok) {
  const int d = static_cast<int>(w.rows());
  std::vector<int> indegree(d, 0);
  std::vector<int> order;
  order.reserve(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (w(j, i) != 0.0) ++indegree[i];
    }
  }
  std::vector<int> ready;
  for (int i = d - 1; i >= 0; --i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    const int j = ready.back();
    ready.pop_back();
    order.push_back(j);
    for (int i = 0; i < d; ++i) {
      if (w(j, i) != 0.0 && --indegree[i] == 0) ready.push_back(i);
    }
  }
  *ok = static_cast<int>(order.size()) == d;
  return order;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError(path + ":" + std::to_string(line) + ": expected a number, got '" + s + "'");
  }
  return v;
}

int parse_index(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || v < 0) {
    throw ParseError(path + ":" + std::to_string(line) + ": expected a node index, got '" + s + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

WeightedGraph::WeightedGraph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() < 1 || weights_.rows() != weights_.cols()) {
    throw PreconditionError("WeightedGraph: adjacency must be square and nonempty");
  }
  if (!weights_.allFinite()) {
    throw PreconditionError("WeightedGraph: adjacency has non-finite entries");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) {
      throw PreconditionError("WeightedGraph: diagonal must be zero (no self-loops)");
    }
  }
}

WeightedGraph WeightedGraph::zero(int num_nodes) {
  return WeightedGraph(Matrix::Zero(num_nodes, num_nodes));
}

int WeightedGraph::num_edges() const {
  return static_cast<int>((weights_.array() != 0.0).count());
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  for (int s = 0; s < num_nodes(); ++s) {
    for (int t = 0; t < num_nodes(); ++t) {
      if (weights_(s, t) != 0.0) out.push_back({s, t, weights_(s, t)});
    }
  }
  return out;
}

std::vector<int> WeightedGraph::parents(int node) const {
  std::vector<int> out;
  for (int j = 0; j < num_nodes(); ++j) {
    if (weights_(j, node) != 0.0) out.push_back(j);
  }
  return out;
}

std::vector<int> WeightedGraph::children(int node) const {
  std::vector<int> out;
  for (int i = 0; i < num_nodes(); ++i) {
    if (weights_(node, i) != 0.0) out.push_back(i);
  }
  return out;
}

void WeightedGraph::set_weight(int source, int target, double value) {
  if (source == target) {
    throw PreconditionError("WeightedGraph::set_weight: no self-loops");
  }
  if (!std::isfinite(value)) {
    throw PreconditionError("WeightedGraph::set_weight: weight must be finite");
  }
  weights_(source, target) = value;
}

WeightedGraph generate_er(const GraphSpec& spec) {
  validate_spec(spec, GraphModel::ER, "generate_er");
  const int d = spec.num_nodes;
  Rng rng(spec.seed);

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  double p = 0.0;
  if (d > 1) {
    const double expected_edges = spec.edges_per_node * d;
    p = 2.0 * expected_edges / (static_cast<double>(d) * d - d);
    if (p > 1.0) {
      // Complete DAG territory; warn once, sweeps hit this on purpose.
      static std::atomic<bool> warned{false};
      if (!warned.exchange(true)) {
        std::cerr << "generate_er: edge probability " << p << " clamped to 1\n";
      }
      p = 1.0;
    }
  }

  Matrix w = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (rng.uniform() < p) w(order[a], order[b]) = draw_weight(rng, spec);
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph generate_sf(const GraphSpec& spec) {
  validate_spec(spec, GraphModel::SF, "generate_sf");
  const int d = spec.num_nodes;
  const int m = static_cast<int>(std::llround(spec.edges_per_node));
  if (std::abs(spec.edges_per_node - m) > 1e-9 || m < 1 || m > d - 1) {
    throw PreconditionError("generate_sf: edges_per_node must be an integer in [1, d-1]");
  }
  Rng rng(spec.seed);

  // Preferential attachment over m isolated seed nodes; the first arrival
  // links to all of them, later arrivals pick m distinct degree-weighted
  // targets. New -> old orientation keeps the result acyclic.
  Matrix w = Matrix::Zero(d, d);
  std::vector<int> bag;  // node id repeated once per incident edge
  for (int v = 0; v < m; ++v) {
    w(m, v) = draw_weight(rng, spec);
    bag.push_back(v);
    bag.push_back(m);
  }
  for (int u = m + 1; u < d; ++u) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      targets.insert(bag[rng.uniform_int(bag.size())]);
    }
    for (int v : targets) w(u, v) = draw_weight(rng, spec);
    for (int v : targets) {
      bag.push_back(v);
      bag.push_back(u);
    }
  }
  return WeightedGraph(std::move(w));
}

WeightedGraph generate_graph(const GraphSpec& spec) {
  return spec.model == GraphModel::ER ? generate_er(spec) : generate_sf(spec);
}

bool is_dag(const WeightedGraph& g) {
  bool ok = false;
  try_topological(g.weights(), &ok);
  return ok;
}

std::vector<int> topological_order(const WeightedGraph& g) {
  bool ok = false;
  auto order = try_topological(g.weights(), &ok);
  if (!ok) throw PreconditionError("topological_order: graph has a directed cycle");
  return order;
}

Cpdag to_cpdag(const WeightedGraph& g) {
  if (!is_dag(g)) throw PreconditionError("to_cpdag: input must be a DAG");
  const int d = g.num_nodes();

  std::vector<std::vector<char>> dir(d, std::vector<char>(d, 0));
  std::vector<std::vector<char>> und(d, std::vector<char>(d, 0));
  auto adjacent = [&](int a, int b) {
    return dir[a][b] || dir[b][a] || und[a][b];
  };
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < d; ++t) {
      if (g.has_edge(s, t)) und[s][t] = und[t][s] = 1;
    }
  }

  auto orient = [&](int a, int b) {  // a -> b becomes compelled
    if (dir[a][b]) return false;
    dir[a][b] = 1;
    und[a][b] = und[b][a] = 0;
    return true;
  };

  // v-structures a -> b <- c with a, c nonadjacent keep the DAG's orientations
  for (int b = 0; b < d; ++b) {
    const auto pa = g.parents(b);
    for (std::size_t x = 0; x < pa.size(); ++x) {
      for (std::size_t y = x + 1; y < pa.size(); ++y) {
        if (!g.has_edge(pa[x], pa[y]) && !g.has_edge(pa[y], pa[x])) {
          orient(pa[x], b);
          orient(pa[y], b);
        }
      }
    }
  }

  // Meek closure, rules R1-R4
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (dir[a][b]) {
          // R1: a -> b, b - c, a and c nonadjacent  =>  b -> c
          for (int c = 0; c < d; ++c) {
            if (c != a && und[b][c] && !adjacent(a, c)) changed |= orient(b, c);
          }
        }
        if (!und[a][b]) continue;
        // R2: a -> c -> b with a - b  =>  a -> b
        for (int c = 0; c < d; ++c) {
          if (dir[a][c] && dir[c][b]) changed |= orient(a, b);
        }
        // R3: a - c, a - e, c -> b, e -> b, c and e nonadjacent  =>  a -> b
        for (int c = 0; c < d; ++c) {
          if (!(und[a][c] && dir[c][b])) continue;
          for (int e = c + 1; e < d; ++e) {
            if (und[a][e] && dir[e][b] && !adjacent(c, e)) changed |= orient(a, b);
          }
        }
        // R4: a - e, e -> c, c -> b, b and e nonadjacent  =>  a -> b
        for (int c = 0; c < d; ++c) {
          if (!dir[c][b]) continue;
          for (int e = 0; e < d; ++e) {
            if (und[a][e] && dir[e][c] && !adjacent(b, e)) changed |= orient(a, b);
          }
        }
      }
    }
  }

  Cpdag out;
  out.num_nodes = d;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (dir[a][b]) out.directed.insert({a, b});
      if (und[a][b] && a < b) out.undirected.insert({a, b});
    }
  }
  return out;
}

bool d_separated(const WeightedGraph& g, int a, int b, const std::vector<int>& given) {
  const int d = g.num_nodes();
  if (!is_dag(g)) throw PreconditionError("d_separated: input must be a DAG");
  if (a < 0 || a >= d || b < 0 || b >= d || a == b) {
    throw PreconditionError("d_separated: need distinct nodes a, b in range");
  }
  std::vector<char> in_z(d, 0);
  for (int z : given) {
    if (z < 0 || z >= d) throw PreconditionError("d_separated: conditioning node out of range");
    if (z == a || z == b) throw PreconditionError("d_separated: a and b must not be conditioned on");
    in_z[z] = 1;
  }

  // ancestors of the conditioning set, conditioning set included
  std::vector<char> anc(d, 0);
  std::vector<int> stack(given.begin(), given.end());
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    if (anc[x]) continue;
    anc[x] = 1;
    for (int p : g.parents(x)) stack.push_back(p);
  }

  // Bayes-ball: state (node, arrived-from-child?); start as if entering a
  // from one of its children.
  std::vector<std::array<char, 2>> seen(d, {0, 0});
  std::vector<std::pair<int, int>> queue{{a, 0}};  // 0 = up (from child), 1 = down (from parent)
  while (!queue.empty()) {
    const auto [x, dirn] = queue.back();
    queue.pop_back();
    if (seen[x][dirn]) continue;
    seen[x][dirn] = 1;
    if (x == b) return false;
    if (dirn == 0 && !in_z[x]) {
      for (int p : g.parents(x)) queue.push_back({p, 0});
      for (int c : g.children(x)) queue.push_back({c, 1});
    } else if (dirn == 1) {
      if (!in_z[x]) {
        for (int c : g.children(x)) queue.push_back({c, 1});
      }
      if (anc[x]) {  // collider at x is active when x is Z or an ancestor of Z
        for (int p : g.parents(x)) queue.push_back({p, 0});
      }
    }
  }
  return true;
}

void save_edge_list(const WeightedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_edge_list: cannot open " + path);
  out << "source,target,weight\n";
  for (const Edge& e : g.edges()) {
    out << e.source << ',' << e.target << ',' << fmt_double(e.weight) << '\n';
  }
  if (!out) throw Error("save_edge_list: write failed for " + path);
}

WeightedGraph load_edge_list(const std::string& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_edge_list: cannot open " + path);
  std::vector<Edge> edges;
  std::string line;
  int lineno = 0;
  int max_node = -1;
  std::set<std::pair<int, int>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && !line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) &&
        line[0] != '-' && line[0] != '+') {
      continue;  // header row
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected source,target,weight");
    }
    Edge e;
    e.source = parse_index(fields[0], path, lineno);
    e.target = parse_index(fields[1], path, lineno);
    e.weight = parse_double(fields[2], path, lineno);
    if (e.source == e.target) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": self-loop");
    }
    if (!seen.insert({e.source, e.target}).second) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": duplicate edge");
    }
    max_node = std::max({max_node, e.source, e.target});
    edges.push_back(e);
  }
  const int d = num_nodes >= 0 ? num_nodes : max_node + 1;
  if (d < 1) throw ParseError("load_edge_list: no nodes in " + path);
  if (max_node >= d) {
    throw ParseError("load_edge_list: node index " + std::to_string(max_node) +
                     " out of range for " + std::to_string(d) + " nodes");
  }
  Matrix w = Matrix::Zero(d, d);
  for (const Edge& e : edges) w(e.source, e.target) = e.weight;
  return WeightedGraph(std::move(w));
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_matrix_csv: cannot open " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << fmt_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("save_matrix_csv: write failed for " + path);
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_matrix_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                       std::to_string(row.size()) + " vs " +
                       std::to_string(rows.front().size()) + " columns)");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("load_matrix_csv: " + path + " is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows.front().size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace golem
