#include "ibn/firefighter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ibn/logmath.hpp"

namespace ibn {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

}  // namespace

BudgetSchedule BudgetSchedule::exponential(double k_scale, double gamma) {
  if (!(k_scale > 0.0)) throw std::invalid_argument("budget scale must be positive");
  return {[k_scale, gamma](std::uint32_t n) -> std::uint64_t {
            const double x = std::floor(k_scale * std::exp(std::pow(static_cast<double>(n), gamma)));
            return x >= 1.8e19 ? kSaturated : static_cast<std::uint64_t>(x);
          },
          "exp"};
}

BudgetSchedule BudgetSchedule::constant(std::uint64_t g) {
  return {[g](std::uint32_t) { return g; }, "const"};
}

Game::Game(std::shared_ptr<const Tree> t, std::uint32_t k, BudgetSchedule g)
    : tree_(std::move(t)), budget_(std::move(g)) {
  if (k > tree_->height()) throw std::invalid_argument("initial ball deeper than the tree");
  state_.assign(tree_->size(), kClear);
  for (std::uint32_t d = 0; d <= k; ++d) {
    for (VertexId v : tree_->level_set(d)) state_[v] = kBurning;
    fire_size_ += tree_->level_size(d);
  }
  front_ = tree_->level_set(k);
  fire_depth_ = k;
}

void Game::step(const std::vector<VertexId>& s) {
  const std::uint32_t n = round_ + 1;
  const std::uint64_t g = budget_(n);
  if (s.size() > g) {
    throw IllegalMove("round " + std::to_string(n) + ": protecting " + std::to_string(s.size()) +
                      " vertices exceeds budget " + std::to_string(g));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const VertexId v = s[i];
    std::string why;
    if (!tree_->contains(v)) {
      why = "unknown vertex";
    } else if (state_[v] == kBurning) {
      why = "vertex is burning";
    } else if (state_[v] == kProtected) {
      why = "vertex already protected";
    }
    if (!why.empty()) {
      for (std::size_t j = 0; j < i; ++j) state_[s[j]] = kClear;
      throw IllegalMove("round " + std::to_string(n) + ": cannot protect " + std::to_string(v) + ": " + why);
    }
    state_[v] = kProtected;
  }
  protected_size_ += s.size();
  round_ = n;
  std::vector<VertexId> next;
  for (VertexId v : front_) {
    for (VertexId ch = tree_->first_child(v); ch != kNoVertex; ch = tree_->next_sibling(ch)) {
      if (state_[ch] == kClear) {
        state_[ch] = kBurning;
        next.push_back(ch);
      }
    }
  }
  fire_size_ += next.size();
  if (!next.empty()) fire_depth_ = tree_->depth(next.front());
  front_.swap(next);
}

SurroundingSet surrounding_set_from_cutset(const Tree& t, const Cutset& cut, std::uint32_t k) {
  SurroundingSet u;
  u.k = k;
  for (EdgeRef e : cut) {
    if (!t.contains(e) || e == t.root()) throw std::invalid_argument("cutset contains an invalid edge");
    if (t.depth(e) <= k) {
      throw std::invalid_argument("cutset edge at depth " + std::to_string(t.depth(e)) + " touches B(" +
                                  std::to_string(k) + ")");
    }
    u.vertices.push_back(e);
  }
  std::sort(u.vertices.begin(), u.vertices.end(), [&](VertexId a, VertexId b) {
    return t.depth(a) != t.depth(b) ? t.depth(a) < t.depth(b) : a < b;
  });
  u.vertices.erase(std::unique(u.vertices.begin(), u.vertices.end()), u.vertices.end());
  return u;
}

bool surround_condition(const Tree& t, const SurroundingSet& u, const BudgetSchedule& g) {
  std::uint64_t budget = 0, used = 0;
  std::size_t i = 0;
  for (std::uint32_t n = 1; i < u.vertices.size(); ++n) {
    budget = saturating_add(budget, g(n));
    while (i < u.vertices.size() && t.depth(u.vertices[i]) <= u.k + n) {
      ++used;
      ++i;
    }
    if (used > budget) return false;
  }
  return true;
}

GameOutcome greedy_play(std::shared_ptr<const Tree> t, std::uint32_t k, const BudgetSchedule& g,
                        const SurroundingSet& u, std::uint32_t horizon) {
  Game game(t, k, g);
  GameOutcome out;
  const std::uint32_t bottom = t->height();
  std::size_t next = 0;
  auto finish = [&](bool contained, std::string reason) {
    out.contained = contained;
    out.rounds = game.round();
    out.fire_size = static_cast<double>(game.fire_size());
    out.protected_size = static_cast<double>(game.protected_size());
    out.reason = std::move(reason);
    return out;
  };
  if (!game.spreading()) return finish(true, "fire has no frontier");
  if (k >= bottom) return finish(false, "fire reached the truncation depth");
  for (std::uint32_t n = 1; n <= horizon; ++n) {
    std::vector<VertexId> s;
    const std::uint64_t budget = g(n);
    while (next < u.vertices.size() && s.size() < budget) {
      const VertexId v = u.vertices[next++];
      if (game.burning(v)) return finish(false, "fire reached surrounding vertex " + std::to_string(v));
      s.push_back(v);
    }
    game.step(s);
    if (!game.spreading()) return finish(true, "contained");
    if (game.fire_depth() >= bottom) return finish(false, "fire reached the truncation depth");
  }
  return finish(false, "not contained by horizon " + std::to_string(horizon));
}

double containment_margin(std::uint32_t k, double gamma) {
  return std::exp(-std::pow(static_cast<double>(k), gamma)) - std::exp(-std::pow(k + 1.0, gamma));
}

namespace {

FireRun play_spherical(const SphericalTree& s, std::uint32_t k, double gamma, double k_scale, std::uint32_t horizon) {
  FireRun run;
  run.gamma = gamma;
  run.horizon = horizon;
  const double log_eps = std::log(containment_margin(k, gamma));
  const std::uint32_t last = std::min<std::uint64_t>(std::uint64_t{k} + horizon, s.horizon());
  std::uint32_t m = 0;
  for (std::uint32_t d = k + 1; d <= last; ++d) {
    if (s.log_level_count(d) - std::pow(static_cast<double>(d), gamma) < log_eps) {
      m = d;
      break;
    }
  }
  auto ball = [&](std::uint32_t d) { return std::round(std::exp(s.log_ball(d))); };
  if (m == 0) {
    run.outcome.rounds = last - k;
    run.outcome.fire_size = ball(last);
    run.outcome.reason = "no cut below the margin within horizon " + std::to_string(horizon);
    return run;
  }
  run.cut_found = true;
  run.cut_depth = m;
  run.cut_size = static_cast<std::size_t>(std::llround(std::exp(s.log_level_count(m))));
  const auto g = BudgetSchedule::exponential(k_scale, gamma);
  // The fire reaches depth m in round m - k; U = E_m must be protected by then.
  double budget = 0.0;
  for (std::uint32_t n = 1; n <= m - k; ++n) budget += static_cast<double>(g(n));
  const double need = std::exp(s.log_level_count(m));
  if (budget + 0.5 >= need) {
    run.outcome.contained = true;
    run.outcome.rounds = m - k;
    run.outcome.fire_size = ball(m - 1);
    run.outcome.protected_size = need;
    run.outcome.reason = "contained";
  } else {
    run.outcome.rounds = m - k;
    run.outcome.fire_size = ball(m);
    run.outcome.protected_size = budget;
    run.outcome.reason = "budget exhausted before the fire reached the cut";
  }
  return run;
}

FireRun play_tree(std::shared_ptr<const Tree> t, std::uint32_t k, double gamma, double k_scale,
                  std::uint32_t horizon) {
  FireRun run;
  run.gamma = gamma;
  run.horizon = horizon;
  const double log_eps = std::log(containment_margin(k, gamma));
  const auto w = EdgeWeightProfile::ibn(gamma);
  const std::uint32_t last = std::min<std::uint64_t>(std::uint64_t{k} + horizon, t->height());
  const auto g = BudgetSchedule::exponential(k_scale, gamma);
  auto below = [&](std::uint32_t n) {
    return t->level_size(n) > 0 && min_cut(*t, w, n).log_value < log_eps;
  };
  if (last <= k || !below(last)) {
    run.outcome = greedy_play(t, k, g, SurroundingSet{{}, k}, horizon);
    run.outcome.contained = false;
    run.outcome.reason = "no cut below the margin within horizon " + std::to_string(horizon);
    return run;
  }
  // Value is non-increasing in depth: find the shallowest qualifying depth.
  std::uint32_t lo = k, hi = last;
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    (below(mid) ? hi : lo) = mid;
  }
  const auto cut = min_cut(*t, w, hi);
  const auto u = surrounding_set_from_cutset(*t, cut.cut, k);
  run.cut_found = true;
  run.cut_size = u.vertices.size();
  run.cut_depth = u.vertices.empty() ? 0 : t->depth(u.vertices.back());
  run.outcome = greedy_play(t, k, g, u, horizon);
  return run;
}

}  // namespace

FireRun construct_and_play(const TreeSource& t, std::uint32_t k, double gamma, double k_scale,
                           std::uint32_t horizon) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (const auto* s = std::get_if<SphericalTree>(&t)) return play_spherical(*s, k, gamma, k_scale, horizon);
  if (const auto* p = std::get_if<std::shared_ptr<const Tree>>(&t)) return play_tree(*p, k, gamma, k_scale, horizon);
  const auto& three = std::get<ThreeOneTree>(t);
  return play_tree(std::make_shared<const Tree>(three.materialize()), k, gamma, k_scale, horizon);
}

Bracket lambda_c_estimate(const TreeSource& t, std::uint32_t k, const std::vector<double>& grid, double k_scale,
                          const DepthSchedule& horizons) {
  horizons.validate();
  TreeSource src = t;
  if (const auto* three = std::get_if<ThreeOneTree>(&t)) src = std::make_shared<const Tree>(three->materialize());
  Bracket b;
  for (double gamma : grid) {
    GridPoint pt;
    pt.param = gamma;
    pt.verdict = Verdict::kBelow;
    for (std::uint32_t h : horizons.depths) {
      const auto run = construct_and_play(src, k, gamma, k_scale, h);
      pt.log_values.push_back(run.outcome.contained ? 0.0 : kNegInf);
      if (run.outcome.contained) {
        pt.verdict = Verdict::kAbove;
        break;
      }
    }
    b.points.push_back(pt);
  }
  for (const auto& pt : b.points) {
    if (pt.verdict == Verdict::kBelow && (!b.lo || pt.param > *b.lo)) b.lo = pt.param;
    if (pt.verdict == Verdict::kAbove && (!b.hi || pt.param < *b.hi)) b.hi = pt.param;
  }
  b.consistent = !(b.lo && b.hi && *b.lo > *b.hi);
  return b;
}

}  // namespace ibn
