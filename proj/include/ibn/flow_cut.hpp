#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ibn/generators.hpp"
#include "ibn/tree.hpp"

namespace ibn {

struct MinCut {
  double log_value = 0.0;
  double value = 0.0;      // clamped to 0 below 1e-300
  bool underflow = false;
  Cutset cut;
};

// Minimum over cutsets of the depth-n truncation of sum w(e). Ties go to
// the shallower edge.
MinCut min_cut(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n);
// Admissible flow whose strength equals the min-cut value.
FlowAssignment max_flow(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n);

struct LevelCut {
  double log_value = 0.0;
  std::uint32_t level = 0;  // the cut is the whole level E_level
};
// Spherically symmetric trees: min over levels of #E_k w(k).
LevelCut min_cut(const SphericalTree& t, const EdgeWeightProfile& w, std::uint32_t n);
// Exact min-cut of the stretched 3-1 tree without materializing it.
double log_min_cut(const ThreeOneTree& t, const EdgeWeightProfile& w, std::uint32_t n,
                   std::size_t entry_cap = std::size_t{1} << 25);
double log_min_cut(const TreeSource& s, const EdgeWeightProfile& w, std::uint32_t n);

struct DepthSchedule {
  std::vector<std::uint32_t> depths;
  double eps_stop = 1e-6;
  double c_stay = 1e-3;

  // from, 2 from, 4 from, ... capped by `to` (which is always included).
  static DepthSchedule doubling(std::uint32_t from, std::uint32_t to);
  void validate() const;
};

enum class Verdict { kBelow, kAbove, kUndecided };
const char* verdict_name(Verdict v);

// "below" if every value >= c_stay; "above" if the values are non-increasing
// and the last one is < eps_stop; otherwise undecided.
Verdict classify(const std::vector<double>& log_values, const DepthSchedule& s);

struct GridPoint {
  double param = 0.0;
  std::vector<double> log_values;  // one per schedule depth
  Verdict verdict = Verdict::kUndecided;
};

struct Bracket {
  std::vector<GridPoint> points;
  std::optional<double> lo;  // largest "below" parameter
  std::optional<double> hi;  // smallest "above" parameter
  std::vector<double> undecided;
  // false when some "below" parameter exceeds some "above" parameter
  bool consistent = true;

  bool contains(double x) const;
  bool overlaps(double a, double b) const;
  bool overlaps(const Bracket& other) const;
  // Width of [lo, hi]; infinite when either side is missing.
  double width() const;
  std::string describe() const;
};

using TrajectoryFn = std::function<double(double param, std::uint32_t depth)>;
Bracket classify_grid(const std::vector<double>& grid, const DepthSchedule& s,
                      const TrajectoryFn& log_value);

std::vector<double> make_grid(double from, double to, double step);
std::vector<double> default_lambda_grid();

Bracket ibn_estimate(const TreeSource& src, const DepthSchedule& s,
                     const std::vector<double>& grid);

struct IgrEstimate {
  double estimate = 0.0;
  bool below_grid = false;   // no grid value qualified
  double loglog_ratio = 0.0; // log log #E_N / log N
};
// Largest grid lambda with sum_{E_n} exp(-n^lambda) >= 1 for every n in
// [ceil(N/2), N].
IgrEstimate igr_estimate(const TreeSource& src, std::uint32_t n,
                         const std::vector<double>& grid = default_lambda_grid());
IgrEstimate igr_estimate(const Tree& t, std::uint32_t n,
                         const std::vector<double>& grid = default_lambda_grid());

}  // namespace ibn
