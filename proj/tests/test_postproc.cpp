#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "golem/errors.hpp"
#include "golem/graph.hpp"
#include "golem/postproc.hpp"
#include "golem/rng.hpp"
#include "support/oracles.hpp"

using golem::Matrix;
using golem::PostprocConfig;
using golem::WeightedGraph;

namespace {

// Random mostly-cyclic matrix with weights spread across the 0.3 threshold.
Matrix messy_matrix(int d, std::uint64_t seed) {
  golem::Rng rng(seed);
  Matrix w = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j || rng.uniform() < 0.4) continue;
      const double mag = rng.uniform(0.05, 1.5);
      w(i, j) = rng.uniform() < 0.5 ? mag : -mag;
    }
  }
  return w;
}

}  // namespace

TEST_CASE("threshold zeroes strictly-below-omega entries") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 0.29;
  w(1, 2) = 0.31;
  w(2, 0) = -0.30;  // exactly omega survives the strict comparison
  const WeightedGraph out = golem::threshold(WeightedGraph(std::move(w)));
  CHECK_FALSE(out.has_edge(0, 1));
  CHECK(out.weight(1, 2) == 0.31);
  CHECK(out.weight(2, 0) == -0.30);
}

TEST_CASE("threshold with omega zero is the identity") {
  const WeightedGraph g(messy_matrix(6, 1));
  PostprocConfig cfg;
  cfg.omega = 0.0;
  CHECK(golem::threshold(g, cfg).weights() == g.weights());
}

TEST_CASE("threshold leaves generator-scale weights alone") {
  // Generated weights have magnitude >= 0.5, above the default omega.
  const WeightedGraph g = oracle::random_dag(12, 2.0, 2);
  CHECK(golem::threshold(g).weights() == g.weights());
}

TEST_CASE("threshold rejects a negative omega") {
  PostprocConfig cfg;
  cfg.omega = -0.1;
  CHECK_THROWS_AS(golem::threshold(WeightedGraph::zero(2), cfg), golem::PreconditionError);
}

TEST_CASE("dagify leaves DAGs unchanged") {
  const WeightedGraph g = oracle::random_dag(10, 2.0, 3);
  CHECK(golem::dagify(g).weights() == g.weights());
}

TEST_CASE("dagify breaks a 2-cycle at the weaker edge") {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 0.5;
  w(1, 0) = 0.4;
  const WeightedGraph out = golem::dagify(WeightedGraph(std::move(w)));
  CHECK(out.weight(0, 1) == 0.5);
  CHECK_FALSE(out.has_edge(1, 0));
}

TEST_CASE("dagify breaks a 3-cycle with a single removal") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 0.6;
  w(1, 2) = -0.5;  // magnitude is what counts
  w(2, 0) = 0.4;
  const WeightedGraph out = golem::dagify(WeightedGraph(std::move(w)));
  CHECK(out.num_edges() == 2);
  CHECK_FALSE(out.has_edge(2, 0));
  CHECK(golem::is_dag(out));
}

TEST_CASE("dagify tie-break picks the lexicographically first edge") {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 0.5;
  w(1, 0) = -0.5;
  const WeightedGraph out = golem::dagify(WeightedGraph(std::move(w)));
  CHECK_FALSE(out.has_edge(0, 1));
  CHECK(out.weight(1, 0) == -0.5);
}

TEST_CASE("dagify ignores edges that sit on no cycle") {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = 0.9;
  w(1, 0) = 0.8;   // the only cycle
  w(2, 3) = 0.01;  // tiny but acyclic, must survive
  const WeightedGraph out = golem::dagify(WeightedGraph(std::move(w)));
  CHECK(out.weight(2, 3) == 0.01);
  CHECK(out.num_edges() == 2);
}

TEST_CASE("dagify output properties on random cyclic matrices") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const WeightedGraph in(messy_matrix(8, 100 + s));
    const WeightedGraph out = golem::dagify(in);

    CHECK(golem::is_dag(out));
    // No additions, no weight edits.
    for (const golem::Edge& e : out.edges()) {
      CHECK(in.weight(e.source, e.target) == e.weight);
    }
    // Idempotent.
    CHECK(golem::dagify(out).weights() == out.weights());
    // Every removed edge was part of some cycle of the input: its target must
    // reach its source.
    for (const golem::Edge& e : in.edges()) {
      if (out.has_edge(e.source, e.target)) continue;
      CHECK(oracle::reachable(in.weights(), e.target, e.source));
    }
  }
}

TEST_CASE("postprocess is threshold then dagify") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const WeightedGraph in(messy_matrix(7, 200 + s));
    const WeightedGraph direct = golem::postprocess(in);
    const WeightedGraph staged = golem::dagify(golem::threshold(in));
    CHECK(direct.weights() == staged.weights());
    CHECK(golem::is_dag(direct));
    // Applying the pipeline again changes nothing.
    CHECK(golem::postprocess(direct).weights() == direct.weights());
  }
}
