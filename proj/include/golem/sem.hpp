#pragma once

#include <cstdint>
#include <string>

#include "golem/graph.hpp"
#include "golem/linalg.hpp"

namespace golem {

enum class NoiseKind { GaussianEV, GaussianNV, Exponential, Gumbel };

// Per-node noise for the linear SEM X_i = sum_j B(j,i) X_j + N_i.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::GaussianEV;
  int num_nodes = 0;
  Vector sigma;  // per-node standard deviations, Gaussian kinds only

  static NoiseSpec gaussian_ev(int num_nodes, double sigma2 = 1.0);
  // Standard deviations drawn once, uniform on [1, 2].
  static NoiseSpec gaussian_nv(int num_nodes, std::uint64_t seed);
  static NoiseSpec exponential(int num_nodes);  // rate 1, not recentred
  static NoiseSpec gumbel(int num_nodes);       // location 0, scale 1, not recentred
};

using DataMatrix = Matrix;  // n x d, one sample per row

// Draws n joint samples. Noise is drawn row-major up front so the stream of
// random values depends only on (noise kind, n, d, seed), not on the edges.
DataMatrix sample(const WeightedGraph& g, const NoiseSpec& noise, int n, std::uint64_t seed);

// Subtracts each column mean in place.
void center_columns(DataMatrix& x);

void save_data_csv(const DataMatrix& x, const std::string& path);
DataMatrix load_data_csv(const std::string& path);

}  // namespace golem
