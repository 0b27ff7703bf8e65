#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ibn/rng.hpp"
#include "ibn/tree.hpp"

namespace ibn::testing {

// Random tree of depth <= max_depth with at most max_edges edges.
inline Tree random_tree(CounterRng& rng, std::uint32_t max_depth, std::size_t max_edges,
                        std::uint32_t max_children = 3) {
  Tree t;
  std::vector<VertexId> frontier{t.root()};
  for (std::uint32_t d = 0; d < max_depth; ++d) {
    std::vector<VertexId> next;
    for (VertexId v : frontier) {
      const auto k = d == 0 ? 1 + rng.below(max_children) : rng.below(max_children + 1);
      for (std::uint64_t i = 0; i < k && t.size() - 1 < max_edges; ++i) next.push_back(t.add_child(v));
    }
    frontier.swap(next);
  }
  return t;
}

// Exhaustive minimum over all edge subsets that are cutsets of the depth-n
// truncation (definition-based oracle).
inline double brute_force_min_cut(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n) {
  std::vector<VertexId> edges;
  for (VertexId v = 1; v < t.size(); ++v) {
    if (t.depth(v) <= n) edges.push_back(v);
  }
  double best = INFINITY;
  const std::uint64_t total = std::uint64_t{1} << edges.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Cutset s;
    double sum = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (mask >> i & 1) {
        s.push_back(edges[i]);
        sum += w.weight(edges[i], t.depth(edges[i]));
      }
    }
    if (sum < best && is_cutset(t, s, n)) best = sum;
  }
  return best;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace ibn::testing
