#include "golem/sem.hpp"

#include <cmath>

#include "golem/errors.hpp"
#include "golem/rng.hpp"

namespace golem {
namespace {

NoiseSpec make_spec(NoiseKind kind, int num_nodes, Vector sigma) {
  if (num_nodes < 1) throw PreconditionError("NoiseSpec: num_nodes must be >= 1");
  NoiseSpec spec;
  spec.kind = kind;
  spec.num_nodes = num_nodes;
  spec.sigma = std::move(sigma);
  return spec;
}

void validate_noise(const NoiseSpec& noise, int d) {
  if (noise.num_nodes != d) {
    throw PreconditionError("sample: noise dimension does not match the graph");
  }
  if (noise.sigma.size() != d || !noise.sigma.allFinite() || (noise.sigma.array() <= 0.0).any()) {
    throw PreconditionError("sample: sigma must hold a positive value per node");
  }
}

}  // namespace

NoiseSpec NoiseSpec::gaussian_ev(int num_nodes, double sigma2) {
  if (!(sigma2 > 0.0)) throw PreconditionError("gaussian_ev: sigma2 must be > 0");
  return make_spec(NoiseKind::GaussianEV, num_nodes,
                   Vector::Constant(num_nodes, std::sqrt(sigma2)));
}

NoiseSpec NoiseSpec::gaussian_nv(int num_nodes, std::uint64_t seed) {
  if (num_nodes < 1) throw PreconditionError("gaussian_nv: num_nodes must be >= 1");
  Rng rng(seed);
  Vector sigma(num_nodes);
  for (int i = 0; i < num_nodes; ++i) sigma[i] = rng.uniform(1.0, 2.0);
  return make_spec(NoiseKind::GaussianNV, num_nodes, std::move(sigma));
}

NoiseSpec NoiseSpec::exponential(int num_nodes) {
  return make_spec(NoiseKind::Exponential, num_nodes, Vector::Ones(num_nodes));
}

NoiseSpec NoiseSpec::gumbel(int num_nodes) {
  return make_spec(NoiseKind::Gumbel, num_nodes, Vector::Ones(num_nodes));
}

DataMatrix sample(const WeightedGraph& g, const NoiseSpec& noise, int n, std::uint64_t seed) {
  const int d = g.num_nodes();
  validate_noise(noise, d);
  if (n < 1) throw PreconditionError("sample: need n >= 1");
  const auto order = topological_order(g);  // rejects cyclic graphs

  Rng rng(seed);
  DataMatrix x(n, d);
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < d; ++i) {
      switch (noise.kind) {
        case NoiseKind::GaussianEV:
        case NoiseKind::GaussianNV:
          x(r, i) = noise.sigma[i] * rng.normal();
          break;
        case NoiseKind::Exponential:
          x(r, i) = rng.exponential();
          break;
        case NoiseKind::Gumbel:
          x(r, i) = rng.gumbel();
          break;
      }
    }
  }

  // X = N (I - B)^{-1}, accumulated parent by parent in topological order.
  const Matrix& w = g.weights();
  for (int i : order) {
    for (int j = 0; j < d; ++j) {
      if (w(j, i) != 0.0) x.col(i) += w(j, i) * x.col(j);
    }
  }
  return x;
}

void center_columns(DataMatrix& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw PreconditionError("center_columns: matrix must be nonempty");
  }
  x.rowwise() -= x.colwise().mean();
}

void save_data_csv(const DataMatrix& x, const std::string& path) { save_matrix_csv(x, path); }

DataMatrix load_data_csv(const std::string& path) { return load_matrix_csv(path); }

}  // namespace golem
