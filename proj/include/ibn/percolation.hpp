#pragma once

#include <cstdint>

#include "ibn/flow_cut.hpp"
#include "ibn/generators.hpp"
#include "ibn/tree.hpp"

namespace ibn {

// Opening probabilities p(e) = exp(-|e|^(lambda-1)), held as logs.
inline EdgeWeightProfile percolation_law(double lambda) { return EdgeWeightProfile::percolation(lambda); }

// log P[root connected to depth n] by s(v) = 1 - prod (1 - p(child) s(child)),
// evaluated as s = -expm1(-sum -log1p(-p s)).
double log_exact_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n);
double log_exact_survival(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n);
double log_exact_survival(const TreeSource& t, const EdgeWeightProfile& log_p, std::uint32_t n);
double exact_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n);

struct McEstimate {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

// Trial i explores the open cluster with random stream (seed, i).
McEstimate mc_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n, std::uint64_t trials,
                       std::uint64_t seed, unsigned threads = 1);
// Spherically symmetric trees: generation sizes follow a binomial
// branching process, so no vertices are materialized.
McEstimate mc_survival(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n,
                       std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

// C/(1+C) where C is the effective conductance for
// c(e(x)) = P[root <-> x] / (1 - p(e(x))). A lower bound on survival.
double conductance_bound(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n);
double conductance_bound(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n);

// Bracket for the percolation threshold from exact survival trajectories.
Bracket theta_estimate(const TreeSource& t, const DepthSchedule& s, const std::vector<double>& grid);

}  // namespace ibn
