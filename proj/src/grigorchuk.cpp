#include "ibn/grigorchuk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/tools/roots.hpp>

#include "ibn/parallel.hpp"
#include "ibn/rng.hpp"

namespace ibn {

namespace {

constexpr std::array<Gen, 4> kLetters = {Gen::kA, Gen::kB, Gen::kC, Gen::kD};

std::size_t ix(Gen g) { return static_cast<std::size_t>(g); }

bool is_bcd(Gen g) { return g == Gen::kB || g == Gen::kC || g == Gen::kD; }

Gen third(Gen x, Gen y) {
  return static_cast<Gen>(2 + 3 + 4 - static_cast<int>(x) - static_cast<int>(y));
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_points(const std::vector<RayPoint>& pts) {
  std::uint64_t h = pts.size();
  for (RayPoint p : pts) h = mix64(h ^ p);
  return h;
}

struct PointsHash {
  std::size_t operator()(const std::vector<RayPoint>& v) const { return hash_points(v); }
};

unsigned word_budget(std::size_t len) {
  return static_cast<unsigned>(std::min<std::size_t>(kMaxRayDepth, len + 8));
}

constexpr unsigned kFilterDepth = 10;

// Hash of the prefix product g_1..g_i as a permutation of {0,1}^kFilterDepth.
std::vector<std::uint64_t> prefix_hashes(std::string_view w) {
  const std::uint32_t size = 1u << kFilterDepth;
  std::vector<std::uint32_t> img(size);
  std::iota(img.begin(), img.end(), 0u);
  std::vector<std::uint64_t> out;
  out.reserve(w.size() + 1);
  auto digest = [&] {
    std::uint64_t h = 0;
    for (std::uint32_t x : img) h = mix64(h ^ x);
    return h;
  };
  out.push_back(digest());
  const Automaton& m = Automaton::grigorchuk();
  for (char ch : w) {
    Gen g = gen_from_char(ch);
    for (auto& x : img) x = act_finite(g, x, kFilterDepth, m);
    out.push_back(digest());
  }
  return out;
}

}  // namespace

Gen gen_from_char(char ch) {
  switch (ch) {
    case 'e': return Gen::kE;
    case 'a': return Gen::kA;
    case 'b': return Gen::kB;
    case 'c': return Gen::kC;
    case 'd': return Gen::kD;
    default: throw std::invalid_argument(std::string("unknown generator '") + ch + "'");
  }
}

char gen_char(Gen g) { return "eabcd"[ix(g)]; }

Automaton Automaton::grigorchuk() {
  Automaton m;
  m.swaps = {false, true, false, false, false};
  m.sections[ix(Gen::kE)] = {Gen::kE, Gen::kE};
  m.sections[ix(Gen::kA)] = {Gen::kE, Gen::kE};
  m.sections[ix(Gen::kB)] = {Gen::kA, Gen::kC};
  m.sections[ix(Gen::kC)] = {Gen::kA, Gen::kD};
  m.sections[ix(Gen::kD)] = {Gen::kE, Gen::kB};
  m.finish();
  return m;
}

Automaton Automaton::corrupted() {
  Automaton m = grigorchuk();
  m.sections[ix(Gen::kD)] = {Gen::kE, Gen::kC};
  m.finish();
  return m;
}

void Automaton::finish() {
  for (std::size_t g = 0; g < 5; ++g) {
    std::array<bool, 5> seen{};
    std::size_t cur = g;
    bool fixes = true;
    while (!seen[cur]) {
      seen[cur] = true;
      if (swaps[cur]) {
        fixes = false;
        break;
      }
      cur = ix(sections[cur][1]);
    }
    fixes_ones[g] = fixes;
  }
}

RayPoint act(Gen g, RayPoint x, const Automaton& m, unsigned budget) {
  budget = std::min(budget, kMaxRayDepth);
  if (x != 0 && static_cast<unsigned>(64 - __builtin_clzll(x)) > budget)
    throw std::length_error("ray point deeper than budget");
  for (unsigned i = 0;; ++i) {
    if (g == Gen::kE) return x;
    if ((x >> i) == 0 && m.fixes_ones[ix(g)]) return x;
    if (i >= budget) throw std::length_error("ray point exceeded depth budget");
    const bool zero = (x >> i) & 1u;
    const Gen next = m.sections[ix(g)][zero ? 0 : 1];
    if (m.swaps[ix(g)]) x ^= RayPoint{1} << i;
    g = next;
  }
}

RayPoint act(std::string_view w, RayPoint x, const Automaton& m, unsigned budget) {
  for (char ch : w) x = act(gen_from_char(ch), x, m, budget);
  return x;
}

std::uint32_t act_finite(Gen g, std::uint32_t x, unsigned depth, const Automaton& m) {
  for (unsigned i = 0; i < depth && g != Gen::kE; ++i) {
    const bool zero = (x >> i) & 1u;
    const Gen next = m.sections[ix(g)][zero ? 0 : 1];
    if (m.swaps[ix(g)]) x ^= 1u << i;
    g = next;
  }
  return x;
}

std::string ray_to_string(RayPoint x) {
  std::string s;
  for (; x != 0; x >>= 1) s.push_back((x & 1u) ? '0' : '1');
  return s + "1^inf";
}

bool verify_relations(unsigned depth, const Automaton& m) {
  if (depth == 0 || depth > 20) throw std::invalid_argument("relation depth must be in [1, 20]");
  const std::uint32_t size = 1u << depth;
  auto perm = [&](std::string_view w) {
    std::vector<std::uint32_t> p(size);
    for (std::uint32_t x = 0; x < size; ++x) {
      std::uint32_t y = x;
      for (char ch : w) y = act_finite(gen_from_char(ch), y, depth, m);
      p[x] = y;
    }
    return p;
  };
  const auto id = perm("");
  const auto b = perm("b"), c = perm("c"), d = perm("d");
  for (const char* w : {"aa", "bb", "cc", "dd"})
    if (perm(w) != id) return false;
  return perm("bc") == d && perm("cb") == d && perm("bd") == c && perm("db") == c && perm("cd") == b &&
         perm("dc") == b;
}

GrigWord reduce(std::string_view w) {
  std::vector<Gen> st;
  st.reserve(w.size());
  for (char ch : w) {
    Gen g = gen_from_char(ch);
    if (g == Gen::kE) continue;
    if (!st.empty() && st.back() == g) {
      st.pop_back();
    } else if (!st.empty() && is_bcd(st.back()) && is_bcd(g)) {
      Gen t = third(st.back(), g);
      st.back() = t;
    } else {
      st.push_back(g);
    }
  }
  GrigWord out;
  out.reserve(st.size());
  for (Gen g : st) out.push_back(gen_char(g));
  return out;
}

Split split(std::string_view w) {
  const Automaton& m = Automaton::grigorchuk();
  Split s;
  std::array<int, 2> pos = {0, 1};
  for (char ch : w) {
    Gen g = gen_from_char(ch);
    for (int side = 0; side < 2; ++side) {
      Gen sec = m.sections[ix(g)][pos[side]];
      if (sec != Gen::kE) (side == 0 ? s.left : s.right).push_back(gen_char(sec));
      if (m.swaps[ix(g)]) pos[side] ^= 1;
    }
    if (m.swaps[ix(g)]) s.swaps = !s.swaps;
  }
  return s;
}

bool acts_trivially(std::string_view w, unsigned depth) {
  if (depth > 24) throw std::invalid_argument("depth too large for exhaustive action");
  const Automaton& m = Automaton::grigorchuk();
  for (std::uint32_t x = 0; x < (1u << depth); ++x) {
    std::uint32_t y = x;
    for (char ch : w) y = act_finite(gen_from_char(ch), y, depth, m);
    if (y != x) return false;
  }
  return true;
}

bool is_trivial(std::string_view w) {
  const GrigWord r = reduce(w);
  if (r.empty()) return true;
  if (std::count(r.begin(), r.end(), 'a') % 2 != 0) return false;
  if (r.size() <= 2) return acts_trivially(r, 3);
  const Split s = split(r);
  return is_trivial(s.left) && is_trivial(s.right);
}

std::vector<RayPoint> extend_orbit(const std::vector<RayPoint>& orbit, Gen g, unsigned budget) {
  const Automaton& m = Automaton::grigorchuk();
  std::vector<RayPoint> out;
  out.reserve(orbit.size() + 1);
  for (RayPoint p : orbit) out.push_back(act(g, p, m, budget));
  out.push_back(act(g, kRootRay, m, budget));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RayPoint> inverted_orbit(std::string_view w) {
  std::vector<RayPoint> orbit{kRootRay};
  const unsigned budget = word_budget(w.size());
  for (char ch : w) orbit = extend_orbit(orbit, gen_from_char(ch), budget);
  return orbit;
}

std::vector<std::uint32_t> orbit_sizes(std::string_view w) {
  std::vector<RayPoint> orbit{kRootRay};
  std::vector<std::uint32_t> s{1};
  s.reserve(w.size() + 1);
  const unsigned budget = word_budget(w.size());
  for (char ch : w) {
    orbit = extend_orbit(orbit, gen_from_char(ch), budget);
    s.push_back(static_cast<std::uint32_t>(orbit.size()));
  }
  return s;
}

GrigWord loop_erase(std::string_view w, std::vector<std::uint32_t>* kept) {
  const auto s = orbit_sizes(w);
  const auto h = prefix_hashes(w);
  const std::size_t len = w.size();
  GrigWord out;
  if (kept) kept->clear();
  std::size_t n = 1;
  while (n <= len) {
    std::size_t last = 0;
    for (std::size_t e = n; e <= len && s[e] == s[n - 1]; ++e)
      if (h[e] == h[n - 1] && is_trivial(w.substr(n - 1, e - n + 1))) last = e;
    if (last != 0) {
      n = last + 1;
    } else {
      out.push_back(w[n - 1]);
      if (kept) kept->push_back(static_cast<std::uint32_t>(n));
      ++n;
    }
  }
  return out;
}

std::pair<std::uint32_t, std::uint32_t> find_size_preserving_loop(std::string_view w) {
  const auto s = orbit_sizes(w);
  const auto h = prefix_hashes(w);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j <= w.size() && s[j] == s[i]; ++j)
      if (h[j] == h[i] && is_trivial(w.substr(i, j - i)))
        return {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
  return {0, 0};
}

SearchResult search_word(std::uint32_t n, std::size_t beam, std::uint64_t seed, unsigned threads,
                         std::uint32_t exhaustive_upto) {
  if (beam == 0) throw std::invalid_argument("beam width must be positive");
  struct State {
    GrigWord word;
    std::vector<RayPoint> orbit;
    double tie = 0.0;
  };
  SearchResult r;
  r.best.assign(1, "");
  r.orbit_size.assign(1, 1);
  r.exhaustive = n <= exhaustive_upto;
  std::vector<State> states{State{"", {kRootRay}, 0.0}};
  for (std::uint32_t len = 1; len <= n; ++len) {
    const unsigned budget = word_budget(len);
    std::vector<State> cand(states.size() * kLetters.size());
    parallel_for(states.size(), threads, [&](std::size_t i) {
      for (std::size_t k = 0; k < kLetters.size(); ++k) {
        State& c = cand[i * kLetters.size() + k];
        c.word = states[i].word;
        c.word.push_back(gen_char(kLetters[k]));
        c.orbit = extend_orbit(states[i].orbit, kLetters[k], budget);
        c.tie = keyed_uniform(seed, stream_id(Purpose::kSearch, len), hash_points(c.orbit));
      }
    });
    std::unordered_map<std::vector<RayPoint>, std::size_t, PointsHash> seen;
    std::vector<State> next;
    next.reserve(cand.size());
    for (auto& c : cand) {
      auto [it, fresh] = seen.emplace(c.orbit, next.size());
      if (fresh)
        next.push_back(std::move(c));
      else if (c.word < next[it->second].word)
        next[it->second].word = std::move(c.word);
    }
    std::sort(next.begin(), next.end(), [](const State& x, const State& y) {
      if (x.orbit.size() != y.orbit.size()) return x.orbit.size() > y.orbit.size();
      if (x.tie != y.tie) return x.tie < y.tie;
      return x.word < y.word;
    });
    if (len > exhaustive_upto && next.size() > beam) next.resize(beam);
    const GrigWord* pick = &next.front().word;
    for (const State& st : next) {
      if (st.orbit.size() != next.front().orbit.size()) break;
      if (st.word < *pick) pick = &st.word;
    }
    r.best.push_back(*pick);
    r.orbit_size.push_back(static_cast<std::uint32_t>(next.front().orbit.size()));
    states = std::move(next);
  }
  return r;
}

GrigWord concatenate_blocks(const SearchResult& r, std::uint32_t blocks) {
  GrigWord w;
  for (std::uint32_t k = 1; k <= blocks; ++k) {
    const std::size_t len = std::size_t{1} << k;
    if (len >= r.best.size()) throw std::out_of_range("search result too short for requested blocks");
    w += r.best[len];
  }
  return w;
}

BranchMarks branch_marks(std::string_view q, std::uint32_t n) {
  auto sizes = orbit_sizes(q);
  sizes[0] = 0;
  return branch_marks_from_sizes(std::move(sizes), n);
}

BranchMarks branch_marks_from_sizes(std::vector<std::uint32_t> sizes, std::uint32_t n) {
  if (sizes.empty() || sizes[0] != 0) throw std::invalid_argument("orbit sizes must start at 0");
  for (std::size_t l = 1; l < sizes.size(); ++l)
    if (sizes[l] < sizes[l - 1] || sizes[l] > sizes[l - 1] + 1)
      throw std::invalid_argument("orbit sizes must grow by 0 or 1 per letter");
  BranchMarks b;
  b.orbit = std::move(sizes);
  const std::size_t len = b.orbit.size() - 1;
  if (len + b.orbit[len] < n) throw std::length_error("word too short for requested depth");
  b.letter_marks.assign(len + 1, false);
  for (std::size_t l = 1; l <= len; ++l) b.letter_marks[l] = b.orbit[l] > b.orbit[l - 1];
  std::vector<bool> symbol_star;
  symbol_star.reserve(n + 1);
  for (std::size_t l = 1; l <= len && symbol_star.size() < n; ++l) {
    symbol_star.push_back(false);
    if (b.letter_marks[l]) symbol_star.push_back(true);
  }
  symbol_star.resize(n);
  b.depth_marks = symbol_star;
  b.lambda.assign(n + 1, 0);
  std::size_t l = 0;
  for (std::uint32_t m = 0; m <= n; ++m) {
    while (l < len && b.orbit[l + 1] + l + 1 <= m) ++l;
    b.lambda[m] = static_cast<std::uint32_t>(l);
  }
  return b;
}

double bartholdi_erschler_eta() {
  auto f = [](double x) { return x * x * x + x * x + x - 2.0; };
  auto r = boost::math::tools::bisect(f, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(52));
  return 0.5 * (r.first + r.second);
}

double bartholdi_erschler_alpha() { return std::log(2.0) / std::log(2.0 / bartholdi_erschler_eta()); }

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fit needs at least three points");
  const std::size_t k = x.size();
  std::vector<double> lx(k), ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0) throw std::invalid_argument("fit needs distinct abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < k; ++i) f.residuals.push_back(ly[i] - f.intercept - f.slope * lx[i]);
  return f;
}

SlopeFit orbit_exponent_estimate(const std::vector<std::uint32_t>& lengths, std::uint64_t seed, std::size_t beam,
                                 unsigned threads) {
  if (lengths.size() < 3) throw std::invalid_argument("exponent fit needs at least three lengths");
  const std::uint32_t top = *std::max_element(lengths.begin(), lengths.end());
  const SearchResult r = search_word(top, beam, seed, threads);
  std::vector<double> x, y;
  for (std::uint32_t n : lengths) {
    x.push_back(n);
    y.push_back(r.orbit_size.at(n));
  }
  return fit_loglog(x, y);
}

}  // namespace ibn
