#pragma once

#include "golem/graph.hpp"

namespace golem {

struct PostprocConfig {
  double omega = 0.3;
};

// Zeroes every weight with |w| strictly below omega.
WeightedGraph threshold(const WeightedGraph& b, const PostprocConfig& cfg = {});

// Removes edges until acyclic: repeatedly drops the smallest-|weight| edge
// among those currently on a directed cycle, ties broken by (source, target).
WeightedGraph dagify(const WeightedGraph& b);

// threshold then dagify; the discrete graph reported by the benchmarks.
WeightedGraph postprocess(const WeightedGraph& b, const PostprocConfig& cfg = {});

}  // namespace golem
