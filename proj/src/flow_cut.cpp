#include "ibn/flow_cut.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibn/logmath.hpp"

namespace ibn {

namespace {

struct CutTables {
  std::vector<double> lm;  // log m(v)
  std::vector<double> ls;  // log sum of children m
  std::vector<double> lw;  // log w(v)
};

CutTables cut_tables(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n) {
  if (t.size() <= 1) throw std::invalid_argument("min_cut on an empty tree");
  if (n == 0) throw std::invalid_argument("truncation depth must be >= 1");
  CutTables ct;
  ct.lm.assign(t.size(), kNegInf);
  ct.ls.assign(t.size(), kNegInf);
  ct.lw.assign(t.size(), 0.0);
  std::vector<double> table;
  if (w.depth_only()) table = w.depth_table(n);
  std::vector<double> buf;
  for (VertexId v = static_cast<VertexId>(t.size()); v-- > 0;) {
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    if (v != t.root()) ct.lw[v] = w.depth_only() ? table[d] : w.log_weight(v, d);
    if (d == n) {
      ct.lm[v] = ct.lw[v];
      continue;
    }
    buf.clear();
    for (VertexId c = t.first_child(v); c != kNoVertex; c = t.next_sibling(c)) buf.push_back(ct.lm[c]);
    ct.ls[v] = log_sum_exp(buf);
    if (v != t.root()) ct.lm[v] = ct.lw[v] <= ct.ls[v] ? ct.lw[v] : ct.ls[v];
  }
  return ct;
}

}  // namespace

MinCut min_cut(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n) {
  const CutTables ct = cut_tables(t, w, n);
  MinCut r;
  r.log_value = ct.ls[t.root()];
  r.value = clamped_exp(r.log_value, &r.underflow);
  std::vector<VertexId> stack;
  for (VertexId c = t.first_child(t.root()); c != kNoVertex; c = t.next_sibling(c)) stack.push_back(c);
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (ct.lm[v] == kNegInf) continue;  // dead end, nothing to cut
    if (t.depth(v) == n || ct.lw[v] <= ct.ls[v]) {
      r.cut.push_back(v);
      continue;
    }
    const std::size_t mark = stack.size();
    for (VertexId c = t.first_child(v); c != kNoVertex; c = t.next_sibling(c)) stack.push_back(c);
    std::reverse(stack.begin() + static_cast<std::ptrdiff_t>(mark), stack.end());
  }
  return r;
}

FlowAssignment max_flow(const Tree& t, const EdgeWeightProfile& w, std::uint32_t n) {
  const CutTables ct = cut_tables(t, w, n);
  std::vector<double> lf(t.size(), kNegInf);
  FlowAssignment theta(t.size(), 0.0);
  for (VertexId v = 1; v < t.size(); ++v) {
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    const VertexId p = t.parent(v);
    if (p == t.root()) {
      lf[v] = ct.lm[v];
    } else if (lf[p] != kNegInf && ct.lm[v] != kNegInf) {
      lf[v] = lf[p] + ct.lm[v] - ct.ls[p];
    }
    theta[v] = std::exp(lf[v]);
  }
  return theta;
}

LevelCut min_cut(const SphericalTree& t, const EdgeWeightProfile& w, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("truncation depth must be >= 1");
  if (n > t.horizon()) throw std::out_of_range("truncation deeper than the tree");
  LevelCut best{kNegInf, 0};
  bool first = true;
  for (std::uint32_t k = 1; k <= n; ++k) {
    const double v = t.log_level_count(k) + w.log_weight_at_depth(k);
    if (first || v < best.log_value) {
      best = {v, k};
      first = false;
    }
  }
  return best;
}

double log_min_cut(const ThreeOneTree& t, const EdgeWeightProfile& w, std::uint32_t n,
                   std::size_t entry_cap) {
  if (n == 0) throw std::invalid_argument("truncation depth must be >= 1");
  if (n > t.horizon()) throw std::out_of_range("truncation deeper than the tree");
  const std::vector<double> lw = w.depth_table(n);
  const std::uint32_t top = ThreeOneTree::base_level(n);
  // suffix minima for rays, and per-level path minima
  std::vector<double> smin(n + 2, std::numeric_limits<double>::infinity());
  for (std::uint32_t d = n; d >= 1; --d) smin[d] = std::min(lw[d], smin[d + 1]);
  auto depth_of = [](std::uint32_t k) { return ThreeOneTree::base_depth(k); };
  std::vector<double> pm(top + 1, 0.0);
  for (std::uint32_t k = 1; k <= top; ++k) {
    const auto a = depth_of(k - 1) + 1;
    const auto b = std::min<std::uint64_t>(depth_of(k), n);
    double m = std::numeric_limits<double>::infinity();
    for (auto d = a; d <= b; ++d) m = std::min(m, lw[d]);
    pm[k] = m;
  }
  if (top == 1) return std::log(2.0) + pm[1];
  if (top >= 3 && (std::size_t{1} << (top - 3)) > entry_cap) {
    throw std::length_error("three-one cut table exceeds the memory cap");
  }
  // Level top-1: every child path is cut off at depth n.
  auto ray = [&](std::uint32_t k) { return smin[depth_of(k) + 1]; };
  const double right_last = std::log(3.0) + pm[top];
  std::vector<double> right;  // values of right-half vertices at level k+1
  bool const_level = true;    // level k+1 right half is the constant right_last
  double edge[3];
  for (std::uint32_t k = top - 1; k-- > 1;) {
    const std::uint64_t half_next = std::uint64_t{1} << k;  // left half size at level k+1
    const std::uint64_t half = std::uint64_t{1} << (k - 1);
    std::vector<double> cur(half);
    const double rnext = ray(k + 1);
    for (std::uint64_t r = 0; r < half; ++r) {
      const std::uint64_t i = half + r;
      const std::uint64_t c0 = 3 * i - (std::uint64_t{1} << k);
      for (int j = 0; j < 3; ++j) {
        const std::uint64_t c = c0 + j;
        double vc;
        if (c < half_next) {
          vc = rnext;
        } else {
          vc = const_level ? right_last : right[c - half_next];
        }
        edge[j] = std::min(pm[k + 1], vc);
      }
      cur[r] = log_sum_exp(edge);
    }
    right.swap(cur);
    const_level = false;
  }
  const double left1 = std::min(pm[1], ray(1));
  const double right1 = std::min(pm[1], const_level ? right_last : right[0]);
  return log_add(left1, right1);
}

double log_min_cut(const TreeSource& s, const EdgeWeightProfile& w, std::uint32_t n) {
  struct V {
    const EdgeWeightProfile& w;
    std::uint32_t n;
    double operator()(const SphericalTree& t) const { return min_cut(t, w, n).log_value; }
    double operator()(const ThreeOneTree& t) const { return log_min_cut(t, w, n); }
    double operator()(const std::shared_ptr<const Tree>& t) const { return min_cut(*t, w, n).log_value; }
  };
  return std::visit(V{w, n}, s);
}

// ---- classification ----------------------------------------------------

DepthSchedule DepthSchedule::doubling(std::uint32_t from, std::uint32_t to) {
  DepthSchedule s;
  for (std::uint64_t d = from; d < to; d *= 2) s.depths.push_back(static_cast<std::uint32_t>(d));
  s.depths.push_back(to);
  s.validate();
  return s;
}

void DepthSchedule::validate() const {
  if (depths.empty()) throw std::invalid_argument("empty depth schedule");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 1) throw std::invalid_argument("schedule depths must be >= 1");
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw std::invalid_argument("schedule depths must be strictly increasing");
    }
  }
  if (!(eps_stop > 0.0) || !(c_stay > 0.0)) throw std::invalid_argument("thresholds must be positive");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kBelow: return "below";
    case Verdict::kAbove: return "above";
    default: return "undecided";
  }
}

Verdict classify(const std::vector<double>& log_values, const DepthSchedule& s) {
  if (log_values.empty()) return Verdict::kUndecided;
  const double log_stay = std::log(s.c_stay);
  const double log_stop = std::log(s.eps_stop);
  bool below = true;
  for (double v : log_values) below = below && v >= log_stay;
  if (below) return Verdict::kBelow;
  bool monotone = true;
  for (std::size_t i = 1; i < log_values.size(); ++i) {
    if (log_values[i] > log_values[i - 1] + 1e-12 * std::max(1.0, std::abs(log_values[i - 1]))) {
      monotone = false;
    }
  }
  if (monotone && log_values.back() < log_stop) return Verdict::kAbove;
  return Verdict::kUndecided;
}

bool Bracket::contains(double x) const {
  return (!lo || *lo <= x) && (!hi || x <= *hi);
}

bool Bracket::overlaps(double a, double b) const {
  const double l = lo ? *lo : -std::numeric_limits<double>::infinity();
  const double h = hi ? *hi : std::numeric_limits<double>::infinity();
  return l <= b && a <= h;
}

bool Bracket::overlaps(const Bracket& o) const {
  return overlaps(o.lo ? *o.lo : -std::numeric_limits<double>::infinity(),
                  o.hi ? *o.hi : std::numeric_limits<double>::infinity());
}

double Bracket::width() const {
  if (!lo || !hi) return std::numeric_limits<double>::infinity();
  return *hi - *lo;
}

std::string Bracket::describe() const {
  std::ostringstream os;
  os << '[' << (lo ? std::to_string(*lo) : std::string("-")) << ", "
     << (hi ? std::to_string(*hi) : std::string("-")) << ']';
  if (!undecided.empty()) os << " undecided=" << undecided.size();
  if (!consistent) os << " inconsistent";
  return os.str();
}

Bracket classify_grid(const std::vector<double>& grid, const DepthSchedule& s,
                      const TrajectoryFn& log_value) {
  s.validate();
  Bracket b;
  for (double p : grid) {
    GridPoint gp;
    gp.param = p;
    for (std::uint32_t d : s.depths) gp.log_values.push_back(log_value(p, d));
    gp.verdict = classify(gp.log_values, s);
    if (gp.verdict == Verdict::kBelow) {
      b.lo = b.lo ? std::max(*b.lo, p) : p;
    } else if (gp.verdict == Verdict::kAbove) {
      b.hi = b.hi ? std::min(*b.hi, p) : p;
    } else {
      b.undecided.push_back(p);
    }
    b.points.push_back(std::move(gp));
  }
  if (b.lo && b.hi && *b.lo > *b.hi) b.consistent = false;
  return b;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0) || to < from) throw std::invalid_argument("bad grid specification");
  std::vector<double> g;
  const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    // round to 12 significant decimals so 0.1+0.05*k prints cleanly
    g.push_back(std::round((from + step * static_cast<double>(i)) * 1e12) / 1e12);
  }
  return g;
}

std::vector<double> default_lambda_grid() { return make_grid(0.05, 0.95, 0.05); }

Bracket ibn_estimate(const TreeSource& src, const DepthSchedule& s, const std::vector<double>& grid) {
  for (double l : grid) {
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("lambda grid must lie inside (0,1)");
  }
  return classify_grid(grid, s, [&](double lambda, std::uint32_t d) {
    return log_min_cut(src, EdgeWeightProfile::ibn(lambda), d);
  });
}

namespace {

IgrEstimate igr_from_levels(const std::function<double(std::uint32_t)>& log_count, std::uint32_t n,
                            const std::vector<double>& grid) {
  if (n == 0) throw std::invalid_argument("igr_estimate needs N >= 1");
  if (grid.empty()) throw std::invalid_argument("empty grid");
  IgrEstimate r;
  r.below_grid = true;
  r.estimate = *std::min_element(grid.begin(), grid.end());
  const std::uint32_t start = (n + 1) / 2;
  for (double lambda : grid) {
    bool ok = true;
    for (std::uint32_t k = std::max<std::uint32_t>(start, 1); k <= n && ok; ++k) {
      ok = log_count(k) - std::pow(static_cast<double>(k), lambda) >= 0.0;
    }
    if (ok && (r.below_grid || lambda > r.estimate)) {
      r.estimate = lambda;
      r.below_grid = false;
    }
  }
  const double lc = log_count(n);
  r.loglog_ratio = (n > 1 && lc > 0.0) ? std::log(lc) / std::log(static_cast<double>(n))
                                       : -std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

IgrEstimate igr_estimate(const TreeSource& src, std::uint32_t n, const std::vector<double>& grid) {
  if (n > source_horizon(src)) throw std::out_of_range("tree shallower than N");
  return igr_from_levels([&](std::uint32_t k) { return source_log_level_count(src, k); }, n, grid);
}

IgrEstimate igr_estimate(const Tree& t, std::uint32_t n, const std::vector<double>& grid) {
  if (n > t.height()) throw std::out_of_range("tree shallower than N");
  return igr_from_levels(
      [&](std::uint32_t k) {
        const auto c = t.level_size(k);
        return c == 0 ? kNegInf : std::log(static_cast<double>(c));
      },
      n, grid);
}

}  // namespace ibn
