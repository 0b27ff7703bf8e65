#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ibn/flow_cut.hpp"
#include "ibn/generators.hpp"
#include "ibn/rng.hpp"
#include "ibn/tree.hpp"

namespace ibn {

// Edge conductances, stored as natural logs like any other weight profile.
using ConductanceField = EdgeWeightProfile;

// Deterministic c(e) = exp(-|e|^lambda).
inline ConductanceField lambda_conductances(double lambda) { return EdgeWeightProfile::ibn(lambda); }

// Series/parallel recursion with R = 0 on E_N. Dead ends above depth N
// carry no current. Returns log C_eff (-inf when nothing reaches depth N).
double log_effective_conductance(const Tree& t, const ConductanceField& c, std::uint32_t n);
double log_effective_conductance(const SphericalTree& t, const ConductanceField& c, std::uint32_t n);
double effective_conductance(const Tree& t, const ConductanceField& c, std::uint32_t n);

struct WalkResult {
  bool returned = false;
  std::uint64_t steps = 0;
  std::uint32_t max_depth = 0;
};

// Nearest-neighbour walk from the root, stopped at the first return to the
// root or after `step_cap` steps. Leaves of the truncation reflect.
class TreeWalker {
 public:
  TreeWalker(std::shared_ptr<const Tree> t, const ConductanceField& c);
  WalkResult run(std::uint64_t step_cap, CounterRng& rng) const;

 private:
  std::shared_ptr<const Tree> tree_;
  std::vector<double> up_;                  // probability of stepping to the parent
  std::vector<std::uint32_t> child_begin_;  // offsets into cum_
  std::vector<double> cum_;                 // cumulative child probabilities
  std::vector<VertexId> child_ids_;
};

// The same walk on a spherically symmetric tree, projected to its depth
// (a birth-death chain). Depths beyond the horizon are never reached.
class DepthWalker {
 public:
  DepthWalker(const SphericalTree& t, const ConductanceField& c);
  WalkResult run(std::uint64_t step_cap, CounterRng& rng) const;

 private:
  std::vector<double> down_;  // probability of stepping away from the root
};

struct WalkSummary {
  std::uint64_t trials = 0;
  std::uint64_t returned = 0;
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  std::vector<WalkResult> results;
};

// 95% Wilson score interval for k successes out of n.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

// Trial i uses the random stream (seed, i).
template <class Walker>
WalkSummary run_walks(const Walker& w, std::uint64_t trials, std::uint64_t step_cap,
                      std::uint64_t seed, unsigned threads);

// Heavy-tailed i.i.d. conductances with L = 1: u uniform on (0,1),
// t = u^(-1/(1-lambda)), C = exp(-t^lambda). The value on edge e depends
// only on (seed, e).
ConductanceField sample_conductances(const Tree& t, double lambda, std::uint64_t seed);
double sample_log_conductance(double lambda, double u);
// P[C <= x] for the law above, x in (0, 1).
double conductance_cdf(double lambda, double x);
// Kolmogorov-Smirnov distance between n draws and the exact law.
double conductance_ks_distance(double lambda, std::size_t n, std::uint64_t seed);

struct PsiField {
  std::vector<double> log_psi;      // psi(e), one per vertex (root entry unused)
  std::vector<double> log_cum_psi;  // Psi(e) = 1 / sum_{g <= e} C_g^-1
};

PsiField psi_field(const Tree& t, const ConductanceField& c, std::uint32_t n);

// Bracket for RT(T, psi): gamma is "below" while the min-cut of Psi^gamma
// stays bounded away from 0 over the schedule.
Bracket rt_estimate(const TreeSource& t, const EdgeWeightProfile& log_cum_psi,
                    const std::vector<double>& gamma_grid, const DepthSchedule& s);
Bracket rt_estimate(std::shared_ptr<const Tree> t, const PsiField& psi,
                    const std::vector<double>& gamma_grid, const DepthSchedule& s);

struct CoupledPercolation {
  std::vector<std::uint8_t> open;  // per vertex; root entry unused
  std::vector<double> psi_c;       // psi_C at each depth, entry 0 unused
};

// Edge e with |e| > 1 is open iff C_g^-1 <= exp(|g|^threshold) for every
// g <= e with |g| > 1; depth-1 edges are always open. `field_lambda` is
// the law the conductances were drawn from.
CoupledPercolation coupled_percolation(const Tree& t, const ConductanceField& c, double field_lambda,
                                       double threshold, std::uint32_t n);

}  // namespace ibn
