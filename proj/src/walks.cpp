#include "ibn/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ibn/logmath.hpp"
#include "ibn/parallel.hpp"

namespace ibn {

namespace {

constexpr double kPosInf = std::numeric_limits<double>::infinity();

// log(1/c + R) given log c and log R (R may be +inf).
double log_series(double log_c, double log_r) {
  if (log_r == kPosInf) return kPosInf;
  return log_add(-log_c, log_r);
}

void require_positive(double log_c) {
  if (log_c == kNegInf || std::isnan(log_c)) throw std::invalid_argument("zero conductance");
}

}  // namespace

double log_effective_conductance(const Tree& t, const ConductanceField& c, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("depth must be >= 1");
  std::vector<double> log_r(t.size(), kPosInf);
  for (std::size_t i = t.size(); i-- > 0;) {
    const auto v = static_cast<VertexId>(i);
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    if (d == n) {
      log_r[v] = kNegInf;
      continue;
    }
    double log_g = kNegInf;
    for (VertexId ch = t.first_child(v); ch != kNoVertex; ch = t.next_sibling(ch)) {
      const double lc = c.log_weight(ch, d + 1);
      require_positive(lc);
      const double s = log_series(lc, log_r[ch]);
      if (s != kPosInf) log_g = log_add(log_g, -s);
    }
    log_r[v] = log_g == kNegInf ? kPosInf : -log_g;
  }
  return -log_r[t.root()];
}

double log_effective_conductance(const SphericalTree& t, const ConductanceField& c, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("depth must be >= 1");
  if (n > t.horizon()) throw std::invalid_argument("depth beyond the tree horizon");
  double log_r = kNegInf;
  for (std::uint32_t k = n; k-- > 0;) {
    const double lc = c.log_weight_at_depth(k + 1);
    require_positive(lc);
    if (t.degree(k) == 0) return kNegInf;
    log_r = log_series(lc, log_r) - std::log(static_cast<double>(t.degree(k)));
  }
  return -log_r;
}

double effective_conductance(const Tree& t, const ConductanceField& c, std::uint32_t n) {
  return std::exp(log_effective_conductance(t, c, n));
}

TreeWalker::TreeWalker(std::shared_ptr<const Tree> t, const ConductanceField& c) : tree_(std::move(t)) {
  const Tree& tr = *tree_;
  up_.assign(tr.size(), 0.0);
  child_begin_.assign(tr.size() + 1, 0);
  cum_.reserve(tr.size());
  child_ids_.reserve(tr.size());
  std::vector<double> logs;
  for (VertexId v = 0; v < tr.size(); ++v) {
    child_begin_[v] = static_cast<std::uint32_t>(cum_.size());
    logs.clear();
    const double up = v == tr.root() ? kNegInf : c.log_weight(v, tr.depth(v));
    logs.push_back(up);
    for (VertexId ch = tr.first_child(v); ch != kNoVertex; ch = tr.next_sibling(ch)) {
      const double lc = c.log_weight(ch, tr.depth(ch));
      require_positive(lc);
      logs.push_back(lc);
      child_ids_.push_back(ch);
    }
    const double total = log_sum_exp(logs);
    up_[v] = total == kNegInf ? 0.0 : std::exp(up - total);
    double acc = up_[v];
    for (std::size_t j = 1; j < logs.size(); ++j) {
      acc += std::exp(logs[j] - total);
      cum_.push_back(acc);
    }
  }
  child_begin_[tr.size()] = static_cast<std::uint32_t>(cum_.size());
}

WalkResult TreeWalker::run(std::uint64_t step_cap, CounterRng& rng) const {
  const Tree& tr = *tree_;
  WalkResult r;
  VertexId v = tr.root();
  if (tr.is_leaf(v)) return r;
  while (r.steps < step_cap) {
    const double u = rng.uniform();
    const std::uint32_t b = child_begin_[v], e = child_begin_[v + 1];
    if (b == e || u < up_[v]) {
      v = tr.parent(v);
    } else {
      std::uint32_t j = b;
      while (j + 1 < e && u >= cum_[j]) ++j;
      v = child_ids_[j];
    }
    ++r.steps;
    r.max_depth = std::max(r.max_depth, tr.depth(v));
    if (v == tr.root()) {
      r.returned = true;
      break;
    }
  }
  return r;
}

DepthWalker::DepthWalker(const SphericalTree& t, const ConductanceField& c) {
  const std::uint32_t h = t.horizon();
  down_.assign(h + 1, 0.0);
  if (h == 0) return;
  down_[0] = t.degree(0) > 0 ? 1.0 : 0.0;
  const auto table = c.depth_table(h);
  for (std::uint32_t n = 1; n < h; ++n) {
    if (t.degree(n) == 0) continue;
    require_positive(table[n]);
    const double x = table[n] - std::log(static_cast<double>(t.degree(n))) - table[n + 1];
    down_[n] = 1.0 / (1.0 + std::exp(x));
  }
}

WalkResult DepthWalker::run(std::uint64_t step_cap, CounterRng& rng) const {
  WalkResult r;
  if (down_.empty() || down_[0] == 0.0) return r;
  std::uint32_t depth = 0;
  const double* down = down_.data();
  while (r.steps < step_cap) {
    if (rng.uniform() < down[depth]) {
      ++depth;
      if (depth > r.max_depth) r.max_depth = depth;
    } else {
      --depth;
    }
    ++r.steps;
    if (depth == 0) {
      r.returned = true;
      break;
    }
  }
  return r;
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

template <class Walker>
WalkSummary run_walks(const Walker& w, std::uint64_t trials, std::uint64_t step_cap, std::uint64_t seed,
                      unsigned threads) {
  WalkSummary s;
  s.trials = trials;
  s.results.resize(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    CounterRng rng(seed, stream_id(Purpose::kWalk, i));
    s.results[i] = w.run(step_cap, rng);
  });
  for (const auto& r : s.results) s.returned += r.returned;
  s.frequency = trials ? static_cast<double>(s.returned) / static_cast<double>(trials) : 0.0;
  std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(s.returned, trials);
  return s;
}

template WalkSummary run_walks<TreeWalker>(const TreeWalker&, std::uint64_t, std::uint64_t, std::uint64_t,
                                           unsigned);
template WalkSummary run_walks<DepthWalker>(const DepthWalker&, std::uint64_t, std::uint64_t, std::uint64_t,
                                            unsigned);

double sample_log_conductance(double lambda, double u) {
  const double log_t = -std::log(u) / (1.0 - lambda);
  return -std::exp(lambda * log_t);
}

ConductanceField sample_conductances(const Tree& t, double lambda, std::uint64_t seed) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
  std::vector<double> lc(t.size(), 0.0);
  for (VertexId v = 1; v < t.size(); ++v) {
    lc[v] = sample_log_conductance(lambda, keyed_uniform(seed, stream_id(Purpose::kConductance, 0), v));
  }
  return EdgeWeightProfile::from_edges(std::move(lc), "sampled");
}

double conductance_cdf(double lambda, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= std::exp(-1.0)) return 1.0;
  return std::pow(-std::log(x), (lambda - 1.0) / lambda);
}

double conductance_ks_distance(double lambda, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one sample");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sample_log_conductance(lambda, keyed_uniform(seed, stream_id(Purpose::kConductance, 1), i));
  }
  std::sort(y.begin(), y.end());
  const double expo = (lambda - 1.0) / lambda;
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = y[i] >= -1.0 ? 1.0 : std::pow(-y[i], expo);
    d = std::max({d, f - static_cast<double>(i) / nn, static_cast<double>(i + 1) / nn - f});
  }
  return d;
}

PsiField psi_field(const Tree& t, const ConductanceField& c, std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("depth must be >= 1");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PsiField f;
  f.log_psi.assign(t.size(), nan);
  f.log_cum_psi.assign(t.size(), nan);
  std::vector<double> log_s(t.size(), kNegInf);
  for (VertexId v = 1; v < t.size(); ++v) {
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    const double lc = c.log_weight(v, d);
    require_positive(lc);
    const double parent = log_s[t.parent(v)];
    log_s[v] = log_add(parent, -lc);
    f.log_cum_psi[v] = -log_s[v];
    f.log_psi[v] = d == 1 ? 0.0 : parent - log_s[v];
  }
  return f;
}

Bracket rt_estimate(const TreeSource& t, const EdgeWeightProfile& log_cum_psi,
                    const std::vector<double>& gamma_grid, const DepthSchedule& s) {
  s.validate();
  if (s.depths.back() > source_horizon(t)) throw std::invalid_argument("schedule exceeds the tree depth");
  return classify_grid(gamma_grid, s, [&](double gamma, std::uint32_t d) {
    return log_min_cut(t, log_cum_psi.pow(gamma), d);
  });
}

Bracket rt_estimate(std::shared_ptr<const Tree> t, const PsiField& psi, const std::vector<double>& gamma_grid,
                    const DepthSchedule& s) {
  return rt_estimate(TreeSource{std::move(t)}, EdgeWeightProfile::from_edges(psi.log_cum_psi, "Psi"), gamma_grid,
                     s);
}

CoupledPercolation coupled_percolation(const Tree& t, const ConductanceField& c, double field_lambda,
                                       double threshold, std::uint32_t n) {
  if (!(field_lambda > 0.0 && field_lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
  CoupledPercolation p;
  p.open.assign(t.size(), 0);
  p.psi_c.assign(n + 1, 1.0);
  const double expo = threshold * (field_lambda - 1.0) / field_lambda;
  for (std::uint32_t d = 2; d <= n; ++d) p.psi_c[d] = 1.0 - std::pow(static_cast<double>(d), expo);
  for (VertexId v = 1; v < t.size(); ++v) {
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    if (d == 1) {
      p.open[v] = 1;
      continue;
    }
    const bool ok = -c.log_weight(v, d) <= std::pow(static_cast<double>(d), threshold);
    p.open[v] = p.open[t.parent(v)] && ok;
  }
  return p;
}

}  // namespace ibn
