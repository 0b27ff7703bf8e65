#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "ibn/walks.hpp"
#include "support.hpp"

using namespace ibn;

namespace {

// Kirchhoff oracle: unit voltage at the root, depth-n vertices grounded,
// solved by dense Gaussian elimination. Returns the current out of the root.
double kirchhoff_conductance(const Tree& t, const ConductanceField& c, std::uint32_t n) {
  std::vector<VertexId> inner;
  std::vector<int> slot(t.size(), -1);
  for (VertexId v = 1; v < t.size(); ++v)
    if (t.depth(v) < n) {
      slot[v] = static_cast<int>(inner.size());
      inner.push_back(v);
    }
  const std::size_t m = inner.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  auto volt_known = [&](VertexId v) { return v == 0 ? 1.0 : 0.0; };
  for (std::size_t i = 0; i < m; ++i) {
    const VertexId v = inner[i];
    auto couple = [&](VertexId u, double g) {
      a[i][i] += g;
      if (slot[u] >= 0)
        a[i][slot[u]] -= g;
      else
        a[i][m] += g * volt_known(u);
    };
    couple(t.parent(v), c.weight(v, t.depth(v)));
    for (VertexId u : t.children(v)) couple(u, c.weight(u, t.depth(u)));
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0) continue;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= m; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> volt(t.size(), 0.0);
  volt[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) volt[inner[i]] = a[i][i] == 0.0 ? 0.0 : a[i][m] / a[i][i];
  double current = 0.0;
  for (VertexId u : t.children(0)) current += c.weight(u, 1) * (1.0 - volt[u]);
  return current;
}

}  // namespace

TEST_CASE("series law on a path") {
  Tree p = path_tree(10);
  const auto c = lambda_conductances(0.5);
  double r = 0.0;
  for (int n = 1; n <= 10; ++n) r += std::exp(std::sqrt(n));
  CHECK(effective_conductance(p, c, 10) == doctest::Approx(1.0 / r).epsilon(1e-12));
}

TEST_CASE("effective conductance matches the Kirchhoff solve") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CounterRng rng(seed, 31);
    Tree t = testing::random_tree(rng, 5, 30);
    const std::uint32_t n = t.height();
    if (n == 0) continue;
    std::vector<double> lw(t.size());
    for (auto& x : lw) x = std::log(0.05 + rng.uniform());
    const auto c = EdgeWeightProfile::from_edges(lw, "random");
    const double oracle = kirchhoff_conductance(t, c, n);
    const double got = effective_conductance(t, c, n);
    CHECK(testing::rel_diff(got, oracle) < 1e-9);
  }
}

TEST_CASE("spherical recursion agrees with the materialized tree") {
  SphericalTree s(sequence_degrees(), 40);
  const Tree t = s.materialize();
  for (double lambda : {0.3, 0.7}) {
    const auto c = lambda_conductances(lambda);
    CHECK(testing::rel_diff(log_effective_conductance(s, c, 40), log_effective_conductance(t, c, 40)) < 1e-12);
  }
}

TEST_CASE("Rayleigh monotonicity") {
  CounterRng rng(5, 7);
  Tree t = testing::random_tree(rng, 6, 60);
  const std::uint32_t n = t.height();
  std::vector<double> lw(t.size());
  for (auto& x : lw) x = std::log(0.1 + rng.uniform());
  const double base = effective_conductance(t, EdgeWeightProfile::from_edges(lw, "w"), n);
  for (VertexId v = 1; v < t.size(); ++v) {
    auto up = lw;
    up[v] += 0.5;
    CHECK(effective_conductance(t, EdgeWeightProfile::from_edges(up, "w"), n) >= base * (1 - 1e-12));
  }
}

TEST_CASE("gambler's ruin on a path") {
  SphericalTree path(constant_degrees(1), 30);
  DepthWalker w(path, EdgeWeightProfile::unit());
  const std::uint64_t trials = 40000;
  const auto s = run_walks(w, trials, 1'000'000, 3, 1);
  CHECK(s.returned == trials);
  std::uint64_t reached = 0;
  for (const auto& r : s.results) reached += r.max_depth >= 10;
  const double p = 0.1;
  const double sd = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(static_cast<double>(reached) / trials - p) < 4 * sd);
}

TEST_CASE("escape before return matches C_eff over root conductance") {
  const auto c = lambda_conductances(0.5);
  SphericalTree bin(constant_degrees(2), 14);
  auto tree = std::make_shared<const Tree>(bin.materialize());
  const std::uint32_t n = 8;
  const double p = effective_conductance(*tree, c, n) / (2 * std::exp(-1.0));
  const std::uint64_t trials = 20000;
  const auto sd = std::sqrt(p * (1 - p) / trials);
  for (int which = 0; which < 2; ++which) {
    const auto s = which == 0 ? run_walks(TreeWalker(tree, c), trials, 10'000'000, 11, 2)
                              : run_walks(DepthWalker(bin, c), trials, 10'000'000, 11, 2);
    std::uint64_t reached = 0;
    for (const auto& r : s.results) reached += r.max_depth >= n;
    CHECK(std::abs(static_cast<double>(reached) / trials - p) < 4 * sd);
  }
}

TEST_CASE("walk summaries are reproducible and thread independent") {
  SphericalTree s(sequence_degrees(), 200);
  DepthWalker w(s, lambda_conductances(0.5));
  const auto a = run_walks(w, 500, 100000, 9, 1);
  const auto b = run_walks(w, 500, 100000, 9, 3);
  CHECK(a.returned == b.returned);
  for (std::size_t i = 0; i < a.results.size(); ++i) CHECK(a.results[i].steps == b.results[i].steps);
  const auto [lo, hi] = wilson_interval(a.returned, a.trials);
  CHECK(lo <= a.frequency);
  CHECK(a.frequency <= hi);
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto [z0, z1] = wilson_interval(0, 100);
  CHECK(z0 < 1e-15);
  CHECK(z1 > 0.0);
}

TEST_CASE("heavy-tailed conductance law") {
  for (double lambda : {0.3, 0.7}) {
    CHECK(conductance_ks_distance(lambda, 20000, 4) < 1.63 / std::sqrt(20000.0));
    // P[C <= exp(-1)] = P[t >= 1] = 1
    CHECK(conductance_cdf(lambda, std::exp(-1.0)) == doctest::Approx(1.0));
    CHECK(conductance_cdf(lambda, std::exp(-8.0)) < conductance_cdf(lambda, std::exp(-2.0)));
    // u = 1 gives t = 1 and C = exp(-1)
    CHECK(sample_log_conductance(lambda, 1.0) == doctest::Approx(-1.0));
  }
}

TEST_CASE("sampled field depends only on seed and edge") {
  SphericalTree s(constant_degrees(2), 6);
  const Tree t = s.materialize();
  const auto a = sample_conductances(t, 0.5, 21);
  const auto b = sample_conductances(t, 0.5, 21);
  const auto c = sample_conductances(t, 0.5, 22);
  int differ = 0;
  for (VertexId v = 1; v < t.size(); ++v) {
    CHECK(a.log_weight(v, t.depth(v)) == b.log_weight(v, t.depth(v)));
    CHECK(a.log_weight(v, t.depth(v)) <= -1.0 + 1e-12);
    differ += a.log_weight(v, t.depth(v)) != c.log_weight(v, t.depth(v));
  }
  CHECK(differ > 0);
}

TEST_CASE("psi field factorizes along paths") {
  SphericalTree s(sequence_degrees(), 30);
  const Tree t = s.materialize();
  const auto c = sample_conductances(t, 0.5, 3);
  const auto f = psi_field(t, c, 30);
  for (VertexId v = 1; v < t.size(); ++v) {
    CHECK(f.log_psi[v] <= 1e-15);
    VertexId u = v;
    double sum = 0.0;
    while (t.depth(u) > 1) {
      sum += f.log_psi[u];
      u = t.parent(u);
    }
    CHECK(f.log_psi[u] == 0.0);
    CHECK(f.log_cum_psi[v] - f.log_cum_psi[u] == doctest::Approx(sum).epsilon(1e-10));
    CHECK(f.log_cum_psi[u] == doctest::Approx(c.log_weight(u, 1)));
  }
}

TEST_CASE("coupled percolation follows the conductance field") {
  SphericalTree s(constant_degrees(2), 12);
  const Tree t = s.materialize();
  const double lambda = 0.5, threshold = 0.4;
  const auto c = sample_conductances(t, lambda, 8);
  const auto p = coupled_percolation(t, c, lambda, threshold, 12);
  std::vector<std::uint64_t> good(13, 0), total(13, 0);
  for (VertexId v = 1; v < t.size(); ++v) {
    const std::uint32_t d = t.depth(v);
    const bool own = d == 1 || -c.log_weight(v, d) <= std::pow(d, threshold);
    const bool expect = own && (d == 1 || p.open[t.parent(v)]);
    CHECK(static_cast<bool>(p.open[v]) == expect);
    total[d]++;
    good[d] += own;
  }
  for (std::uint32_t d = 2; d <= 12; ++d) {
    const double q = 1.0 - std::pow(d, threshold * (lambda - 1) / lambda);
    CHECK(p.psi_c[d] == doctest::Approx(q).epsilon(1e-12));
  }
  const double q12 = p.psi_c[12];
  const double sd = std::sqrt(q12 * (1 - q12) / total[12]);
  CHECK(std::abs(static_cast<double>(good[12]) / total[12] - q12) < 4 * sd);
}

TEST_CASE("zero conductance is rejected") {
  Tree p = path_tree(3);
  std::vector<double> lw(p.size(), 0.0);
  lw[2] = -INFINITY;
  CHECK_THROWS(effective_conductance(p, EdgeWeightProfile::from_edges(lw, "z"), 3));
}
