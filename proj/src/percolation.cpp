#include "ibn/percolation.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <cmath>
#include <stdexcept>

#include "ibn/logmath.hpp"
#include "ibn/parallel.hpp"
#include "ibn/walks.hpp"

namespace ibn {

namespace {

// -log(1 - exp(log_x)) for log_x <= 0.
double neg_log1m(double log_x) {
  if (log_x == kNegInf) return 0.0;
  return -log1m_exp(std::min(log_x, 0.0));
}

// log(1 - exp(-y)) for y >= 0.
double log_from_hazard(double y) {
  if (y == 0.0) return kNegInf;
  return log1m_exp(-y);
}

void require_depth(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("depth must be >= 1");
}

McEstimate finish(std::uint64_t trials, std::uint64_t hits) {
  McEstimate m;
  m.trials = trials;
  m.hits = hits;
  m.estimate = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  m.stderr_ = trials ? std::sqrt(m.estimate * (1 - m.estimate) / static_cast<double>(trials)) : 0.0;
  return m;
}

}  // namespace

double log_exact_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  require_depth(n);
  std::vector<double> log_s(t.size(), kNegInf);
  for (std::size_t i = t.size(); i-- > 0;) {
    const auto v = static_cast<VertexId>(i);
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    if (d == n) {
      log_s[v] = 0.0;
      continue;
    }
    double y = 0.0;
    for (VertexId ch = t.first_child(v); ch != kNoVertex; ch = t.next_sibling(ch)) {
      y += neg_log1m(log_p.log_weight(ch, d + 1) + log_s[ch]);
    }
    log_s[v] = log_from_hazard(y);
  }
  return log_s[t.root()];
}

double log_exact_survival(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  require_depth(n);
  if (n > t.horizon()) throw std::invalid_argument("depth beyond the tree horizon");
  double log_s = 0.0;
  for (std::uint32_t k = n; k-- > 0;) {
    const double y = t.degree(k) * neg_log1m(log_p.log_weight_at_depth(k + 1) + log_s);
    log_s = log_from_hazard(y);
  }
  return log_s;
}

double log_exact_survival(const TreeSource& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  if (const auto* s = std::get_if<SphericalTree>(&t)) return log_exact_survival(*s, log_p, n);
  if (const auto* p = std::get_if<std::shared_ptr<const Tree>>(&t)) return log_exact_survival(**p, log_p, n);
  return log_exact_survival(std::get<ThreeOneTree>(t).materialize(), log_p, n);
}

double exact_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  return std::exp(log_exact_survival(t, log_p, n));
}

McEstimate mc_survival(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n, std::uint64_t trials,
                       std::uint64_t seed, unsigned threads) {
  require_depth(n);
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  std::vector<double> p(t.size(), 0.0);
  for (VertexId v = 1; v < t.size(); ++v) {
    if (t.depth(v) <= n) p[v] = std::exp(log_p.log_weight(v, t.depth(v)));
  }
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    CounterRng rng(seed, stream_id(Purpose::kPercolation, i));
    std::vector<VertexId> stack{t.root()};
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      if (t.depth(v) == n) {
        hit[i] = 1;
        return;
      }
      for (VertexId ch = t.first_child(v); ch != kNoVertex; ch = t.next_sibling(ch)) {
        if (rng.uniform() < p[ch]) stack.push_back(ch);
      }
    }
  });
  std::uint64_t hits = 0;
  for (auto h : hit) hits += h;
  return finish(trials, hits);
}

McEstimate mc_survival(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n,
                       std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  require_depth(n);
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (n > t.horizon()) throw std::invalid_argument("depth beyond the tree horizon");
  const auto table = log_p.depth_table(n);
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t i) {
    CounterRng rng(seed, stream_id(Purpose::kPercolation, i));
    std::int64_t z = 1;
    for (std::uint32_t k = 0; k < n && z > 0; ++k) {
      const std::int64_t edges = z * static_cast<std::int64_t>(t.degree(k));
      const double p = std::exp(table[k + 1]);
      if (p >= 1.0) {
        z = edges;
      } else {
        boost::random::binomial_distribution<std::int64_t, double> bin(edges, p);
        z = bin(rng);
      }
    }
    hit[i] = z > 0;
  });
  std::uint64_t hits = 0;
  for (auto h : hit) hits += h;
  return finish(trials, hits);
}

namespace {

double bound_from_log_conductance(double log_c) { return 1.0 / (1.0 + std::exp(-log_c)); }

}  // namespace

double conductance_bound(const Tree& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  require_depth(n);
  std::vector<double> log_reach(t.size(), 0.0), log_c(t.size(), 0.0);
  for (VertexId v = 1; v < t.size(); ++v) {
    const std::uint32_t d = t.depth(v);
    if (d > n) continue;
    const double lp = log_p.log_weight(v, d);
    log_reach[v] = log_reach[t.parent(v)] + lp;
    log_c[v] = log_reach[v] + neg_log1m(lp);
  }
  return bound_from_log_conductance(
      log_effective_conductance(t, EdgeWeightProfile::from_edges(std::move(log_c), "perc"), n));
}

double conductance_bound(const SphericalTree& t, const EdgeWeightProfile& log_p, std::uint32_t n) {
  require_depth(n);
  const auto table = log_p.depth_table(n);
  std::vector<double> log_c(n + 1, 0.0);
  double reach = 0.0;
  for (std::uint32_t d = 1; d <= n; ++d) {
    reach += table[d];
    log_c[d] = reach + neg_log1m(table[d]);
  }
  const auto c = EdgeWeightProfile::from_depth_rule([log_c](std::uint32_t d) { return log_c.at(d); }, "perc");
  return bound_from_log_conductance(log_effective_conductance(t, c, n));
}

Bracket theta_estimate(const TreeSource& t, const DepthSchedule& s, const std::vector<double>& grid) {
  s.validate();
  for (double l : grid) {
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("grid must lie inside (0,1)");
  }
  if (const auto* three = std::get_if<ThreeOneTree>(&t)) {
    const TreeSource tree = std::make_shared<const Tree>(three->materialize());
    return theta_estimate(tree, s, grid);
  }
  return classify_grid(grid, s, [&](double lambda, std::uint32_t d) {
    return log_exact_survival(t, percolation_law(lambda), d);
  });
}

}  // namespace ibn
