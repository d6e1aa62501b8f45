#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "golem/errors.hpp"
#include "golem/linalg.hpp"
#include "golem/sem.hpp"
#include "support/oracles.hpp"

using golem::DataMatrix;
using golem::Matrix;
using golem::NoiseSpec;
using golem::WeightedGraph;

namespace {

WeightedGraph bivariate_chain(double b0) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = b0;
  return WeightedGraph(std::move(w));
}

double column_variance(const DataMatrix& x, int col) {
  const double mean = x.col(col).mean();
  return (x.col(col).array() - mean).square().sum() / (x.rows() - 1);
}

}  // namespace

TEST_CASE("noise factories") {
  const NoiseSpec ev = NoiseSpec::gaussian_ev(3);
  CHECK(ev.sigma.size() == 3);
  CHECK(ev.sigma.minCoeff() == 1.0);
  CHECK(ev.sigma.maxCoeff() == 1.0);

  const NoiseSpec wide = NoiseSpec::gaussian_ev(3, 4.0);
  CHECK(wide.sigma.minCoeff() == 2.0);  // sigma2 = 4 means sd 2

  const NoiseSpec nv = NoiseSpec::gaussian_nv(5, 17);
  CHECK(nv.sigma.size() == 5);
  CHECK(nv.sigma.minCoeff() >= 1.0);
  CHECK(nv.sigma.maxCoeff() <= 2.0);
  CHECK(nv.sigma == NoiseSpec::gaussian_nv(5, 17).sigma);
  CHECK(nv.sigma != NoiseSpec::gaussian_nv(5, 18).sigma);
}

TEST_CASE("sample validates its inputs") {
  const WeightedGraph g = bivariate_chain(1.0);
  CHECK_THROWS_AS(golem::sample(g, NoiseSpec::gaussian_ev(3), 10, 0), golem::PreconditionError);
  CHECK_THROWS_AS(golem::sample(g, NoiseSpec::gaussian_ev(2), 0, 0), golem::PreconditionError);

  NoiseSpec bad = NoiseSpec::gaussian_ev(2);
  bad.sigma[1] = 0.0;
  CHECK_THROWS_AS(golem::sample(g, bad, 10, 0), golem::PreconditionError);

  Matrix cyc = Matrix::Zero(2, 2);
  cyc(0, 1) = 1.0;
  cyc(1, 0) = 0.5;
  CHECK_THROWS_AS(golem::sample(WeightedGraph(std::move(cyc)), NoiseSpec::gaussian_ev(2), 10, 0),
                  golem::PreconditionError);
}

TEST_CASE("sampling is deterministic in the seed") {
  const WeightedGraph g = oracle::random_dag(6, 2.0, 11);
  const NoiseSpec noise = NoiseSpec::gaussian_ev(6);
  CHECK(golem::sample(g, noise, 50, 4) == golem::sample(g, noise, 50, 4));
  CHECK(golem::sample(g, noise, 50, 4) != golem::sample(g, noise, 50, 5));
}

TEST_CASE("the noise stream depends on dimensions and seed, not on the edges") {
  // With B = 0 the sample is exactly the noise matrix, so a structural model
  // over the same stream must reproduce it column by column.
  const NoiseSpec noise = NoiseSpec::gaussian_ev(2);
  const DataMatrix pure = golem::sample(WeightedGraph::zero(2), noise, 200, 9);
  const DataMatrix chained = golem::sample(bivariate_chain(1.5), noise, 200, 9);
  CHECK(chained.col(0) == pure.col(0));
  CHECK((chained.col(1) - (1.5 * chained.col(0) + pure.col(1))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("recursive sampling agrees with the dense-inverse path") {
  for (std::uint64_t s : {1ULL, 2ULL, 3ULL}) {
    const WeightedGraph g = oracle::random_dag(8, 2.0, 60 + s);
    const NoiseSpec noise = NoiseSpec::gaussian_nv(8, 60 + s);
    const DataMatrix x = golem::sample(g, noise, 100, s);
    const DataMatrix n = golem::sample(WeightedGraph::zero(8), noise, 100, s);
    const Matrix a = Matrix::Identity(8, 8) - g.weights();
    const DataMatrix dense = n * a.inverse();
    CHECK((x - dense).cwiseAbs().maxCoeff() <= 1e-10 * dense.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("equal-variance scaling is linear in sigma") {
  const WeightedGraph g = WeightedGraph::zero(3);
  const DataMatrix unit = golem::sample(g, NoiseSpec::gaussian_ev(3, 1.0), 40, 2);
  const DataMatrix scaled = golem::sample(g, NoiseSpec::gaussian_ev(3, 4.0), 40, 2);
  CHECK((scaled - 2.0 * unit).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("bivariate chain covariance matches the closed form") {
  // X0 ~ N(0,1), X1 = 1.5 X0 + N1: cov = [[1, 1.5], [1.5, 3.25]].
  const int n = 100000;
  DataMatrix x = golem::sample(bivariate_chain(1.5), NoiseSpec::gaussian_ev(2), n, 123);
  golem::center_columns(x);
  const Matrix cov = (x.transpose() * x) / (n - 1);

  // 5 sigma with var(cov_ij) ~ (s_ii s_jj + s_ij^2) / n.
  CHECK(std::abs(cov(0, 0) - 1.0) <= 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov(0, 1) - 1.5) <= 5.0 * std::sqrt((3.25 + 2.25) / n));
  CHECK(std::abs(cov(1, 1) - 3.25) <= 5.0 * std::sqrt(2.0 * 3.25 * 3.25 / n));
}

TEST_CASE("non-equal-variance noise reproduces its per-node variances") {
  const int n = 100000;
  const NoiseSpec noise = NoiseSpec::gaussian_nv(4, 99);
  const DataMatrix x = golem::sample(WeightedGraph::zero(4), noise, n, 321);
  for (int i = 0; i < 4; ++i) {
    const double want = noise.sigma[i] * noise.sigma[i];
    CHECK(std::abs(column_variance(x, i) - want) <= 3.0 * want * std::sqrt(2.0 / (n - 1)));
  }
}

TEST_CASE("exponential noise has mean 1 and variance 1, and is not recentred") {
  const int n = 100000;
  const DataMatrix x = golem::sample(WeightedGraph::zero(1), NoiseSpec::exponential(1), n, 5);
  CHECK(x.minCoeff() > 0.0);  // support of Exp(1); recentring would break this
  CHECK(std::abs(x.col(0).mean() - 1.0) <= 5.0 / std::sqrt(n));
  CHECK(std::abs(column_variance(x, 0) - 1.0) <= 5.0 * std::sqrt(8.0 / n));
}

TEST_CASE("gumbel noise has the standard Gumbel moments") {
  const int n = 100000;
  const double euler = 0.57721566490153286;
  const double var = std::numbers::pi * std::numbers::pi / 6.0;
  const DataMatrix x = golem::sample(WeightedGraph::zero(1), NoiseSpec::gumbel(1), n, 6);
  CHECK(std::abs(x.col(0).mean() - euler) <= 5.0 * std::sqrt(var / n));
  // Excess kurtosis 12/5 puts var(s^2) at 4.4 sigma^4 / n.
  CHECK(std::abs(column_variance(x, 0) - var) <= 5.0 * std::sqrt(4.4 * var * var / n));
}

TEST_CASE("center_columns removes the column means in place") {
  DataMatrix x = golem::sample(bivariate_chain(1.5), NoiseSpec::exponential(2), 500, 8);
  const double before = x.colwise().mean().cwiseAbs().maxCoeff();
  CHECK(before > 0.5);  // exponential noise is far from centered
  golem::center_columns(x);
  CHECK(x.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("data CSV round trip is exact") {
  const DataMatrix x =
      golem::sample(oracle::random_dag(5, 2.0, 2), NoiseSpec::gaussian_ev(5), 20, 3);
  const auto path = std::filesystem::temp_directory_path() / "golem_data_roundtrip.csv";
  golem::save_data_csv(x, path.string());
  CHECK(golem::load_data_csv(path.string()) == x);
  std::filesystem::remove(path);
}
