#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ibn/flow_cut.hpp"
#include "ibn/generators.hpp"
#include "ibn/tree.hpp"

namespace ibn {

// Number of vertices that may be protected in round n >= 1.
struct BudgetSchedule {
  std::function<std::uint64_t(std::uint32_t)> rule;
  std::string name;

  std::uint64_t operator()(std::uint32_t n) const { return rule(n); }
  // g_n = floor(K exp(n^gamma)), saturating at 2^64 - 1.
  static BudgetSchedule exponential(double k_scale, double gamma);
  static BudgetSchedule constant(std::uint64_t g);
};

class IllegalMove : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Firefighting game on a tree with initial fire B(k). Each round first
// protects S_n and then spreads the fire to every unprotected neighbour.
class Game {
 public:
  Game(std::shared_ptr<const Tree> t, std::uint32_t k, BudgetSchedule g);

  void step(const std::vector<VertexId>& s);

  std::uint32_t round() const { return round_; }
  bool burning(VertexId v) const { return state_[v] == kBurning; }
  bool is_protected(VertexId v) const { return state_[v] == kProtected; }
  std::uint64_t fire_size() const { return fire_size_; }
  std::uint64_t protected_size() const { return protected_size_; }
  // Vertices that caught fire in the last round.
  const std::vector<VertexId>& front() const { return front_; }
  bool spreading() const { return !front_.empty(); }
  std::uint32_t fire_depth() const { return fire_depth_; }
  const Tree& tree() const { return *tree_; }

 private:
  enum : std::uint8_t { kClear = 0, kBurning = 1, kProtected = 2 };
  std::shared_ptr<const Tree> tree_;
  BudgetSchedule budget_;
  std::vector<std::uint8_t> state_;
  std::vector<VertexId> front_;
  std::uint32_t round_ = 0;
  std::uint32_t fire_depth_ = 0;
  std::uint64_t fire_size_ = 0;
  std::uint64_t protected_size_ = 0;
};

struct SurroundingSet {
  std::vector<VertexId> vertices;  // sorted by (depth, id)
  std::uint32_t k = 0;
};

SurroundingSet surrounding_set_from_cutset(const Tree& t, const Cutset& cut, std::uint32_t k);

// #{v in U : |v| <= k+n} <= g_1 + ... + g_n for every n.
bool surround_condition(const Tree& t, const SurroundingSet& u, const BudgetSchedule& g);

struct GameOutcome {
  bool contained = false;
  std::uint32_t rounds = 0;
  double fire_size = 0.0;
  double protected_size = 0.0;
  std::string reason;
};

// Protects U in (depth, id) order, g_n vertices per round, for at most
// `horizon` rounds. Reaching the bottom of the truncation counts as escape.
GameOutcome greedy_play(std::shared_ptr<const Tree> t, std::uint32_t k, const BudgetSchedule& g,
                        const SurroundingSet& u, std::uint32_t horizon);

// exp(-k^gamma) - exp(-(k+1)^gamma)
double containment_margin(std::uint32_t k, double gamma);

struct FireRun {
  double gamma = 0.0;
  std::uint32_t horizon = 0;
  bool cut_found = false;
  std::uint32_t cut_depth = 0;  // deepest vertex of U
  std::size_t cut_size = 0;
  GameOutcome outcome;
};

// Looks for a min-cut at lambda = gamma of value below the margin within
// depth k + horizon, and plays the greedy strategy on it. No cut means
// "not contained by horizon".
FireRun construct_and_play(const TreeSource& t, std::uint32_t k, double gamma, double k_scale,
                           std::uint32_t horizon);

// "below" = not contained at any horizon of the schedule, "above" =
// contained at some horizon.
Bracket lambda_c_estimate(const TreeSource& t, std::uint32_t k, const std::vector<double>& grid, double k_scale,
                          const DepthSchedule& horizons);

}  // namespace ibn
