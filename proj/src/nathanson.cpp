#include "ibn/nathanson.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace ibn {

std::size_t Mat2Hash::operator()(const Mat2& m) const {
  std::hash<BigInt> h;
  std::size_t s = h(m.a);
  for (const BigInt* x : {&m.b, &m.c, &m.d}) s ^= h(*x) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  return s;
}

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 word_matrix(std::string_view w) {
  Mat2 m = Mat2::identity();
  for (char ch : w) {
    if (ch == 'a') {
      m = mat_mul(m, Mat2::gen_a());
    } else if (ch == 'b') {
      m = mat_mul(m, Mat2::gen_b());
    } else {
      throw std::invalid_argument(std::string("unknown generator '") + ch + "'");
    }
  }
  return m;
}

std::string SemigroupBall::word(VertexId v) const {
  std::string w;
  for (; v != tree.root(); v = tree.parent(v)) w.push_back(letter[v]);
  std::reverse(w.begin(), w.end());
  return w;
}

SemigroupBall bfs_ball(std::uint32_t n, std::size_t element_cap) {
  SemigroupBall s;
  s.letter.push_back('\0');
  s.matrix.push_back(Mat2::identity());
  s.ball.push_back(0);
  std::unordered_map<Mat2, VertexId, Mat2Hash> seen;
  seen.emplace(Mat2::identity(), 0);
  const Mat2 gens[2] = {Mat2::gen_b(), Mat2::gen_a()};
  const char names[2] = {'b', 'a'};
  for (std::uint32_t d = 0; d < n; ++d) {
    const std::vector<VertexId> level = s.tree.level_set(d);
    for (VertexId v : level) {
      for (int g = 0; g < 2; ++g) {
        Mat2 m = mat_mul(s.matrix[v], gens[g]);
        if (seen.count(m)) continue;
        if (s.tree.size() >= element_cap) {
          throw std::length_error("semigroup ball exceeds the element cap of " + std::to_string(element_cap));
        }
        const VertexId child = s.tree.add_child(v);
        seen.emplace(m, child);
        s.matrix.push_back(std::move(m));
        s.letter.push_back(names[g]);
      }
    }
    s.ball.push_back(s.tree.size() - 1);
  }
  return s;
}

bool ball_upper_bound_holds(std::uint32_t n, std::uint64_t count) {
  if (n == 0) return count == 0;
  const double nn = static_cast<double>(n);
  return std::log(static_cast<double>(count)) <= std::log(2.0) + (2 * std::sqrt(nn) + 2) * std::log(nn) + 1e-12;
}

const char* word_type_name(WordType t) {
  switch (t) {
    case WordType::kPower: return "power";
    case WordType::kSingleB: return "single-b";
    case WordType::kPrimeBlocks: return "prime-blocks";
    case WordType::kOther: return "other";
  }
  return "?";
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

WordType classify_word(std::string_view w) {
  std::vector<std::size_t> bs;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 'b') {
      bs.push_back(i);
    } else if (w[i] != 'a') {
      return WordType::kOther;
    }
  }
  if (bs.empty()) return WordType::kPower;
  if (bs.size() == 1) return WordType::kSingleB;
  std::uint64_t last = 0;
  for (std::size_t t = 0; t + 1 < bs.size(); ++t) {
    const std::uint64_t p = bs[t + 1] - bs[t];  // block b a^(p-1)
    if (!is_prime(p) || p < last) return WordType::kOther;
    last = p;
  }
  return WordType::kPrimeBlocks;
}

namespace {

// Relative flow (c = 1) along the prime-splitting rule.
std::vector<double> unit_prime_flow(const SemigroupBall& s) {
  const Tree& t = s.tree;
  std::vector<double> theta(t.size(), 0.0);
  std::vector<std::uint32_t> run(t.size(), 0);
  std::vector<std::uint64_t> max_prime(t.size(), 0);
  std::vector<std::uint8_t> in_b(t.size(), 0);
  for (VertexId ch = t.first_child(t.root()); ch != kNoVertex; ch = t.next_sibling(ch)) {
    if (s.letter[ch] == 'b') {
      theta[ch] = 1.0;
      in_b[ch] = 1;
    }
  }
  for (VertexId v = 1; v < t.size(); ++v) {
    const VertexId p = t.parent(v);
    if (p != t.root()) {
      in_b[v] = in_b[p];
      run[v] = s.letter[v] == 'a' ? run[p] + 1 : 0;
    }
    const std::uint64_t q = run[v] + 1;
    const bool prime = in_b[v] && run[v] > 0 && is_prime(q);
    const std::uint64_t before = p == t.root() ? 0 : max_prime[p];
    max_prime[v] = prime ? std::max(before, q) : before;
    if (theta[v] == 0.0 || t.is_leaf(v)) continue;
    VertexId via_a = kNoVertex, via_b = kNoVertex;
    for (VertexId ch = t.first_child(v); ch != kNoVertex; ch = t.next_sibling(ch)) {
      (s.letter[ch] == 'a' ? via_a : via_b) = ch;
    }
    if (prime && q > before && via_a != kNoVertex && via_b != kNoVertex) {
      theta[via_a] = theta[v] / 2;
      theta[via_b] = theta[v] / 2;
    } else {
      theta[via_a != kNoVertex ? via_a : via_b] = theta[v];
    }
  }
  return theta;
}

}  // namespace

FlowAssignment prime_flow(const SemigroupBall& s, double c) {
  auto theta = unit_prime_flow(s);
  for (auto& x : theta) x *= c;
  return theta;
}

double max_prime_flow_scale(const SemigroupBall& s, double lambda, std::uint32_t n) {
  const auto theta = unit_prime_flow(s);
  double best = std::numeric_limits<double>::infinity();
  for (VertexId v = 1; v < s.tree.size(); ++v) {
    const std::uint32_t d = s.tree.depth(v);
    if (d > n || theta[v] == 0.0) continue;
    best = std::min(best, std::exp(-std::pow(static_cast<double>(d), lambda)) / theta[v]);
  }
  return best;
}

std::vector<GrowthRow> growth_stats(const SemigroupBall& s) {
  std::vector<GrowthRow> rows;
  for (std::uint32_t n = 1; n <= s.tree.height(); ++n) {
    GrowthRow r;
    r.n = n;
    r.ball = s.ball[n];
    r.level = s.tree.level_size(n);
    r.loglog_ratio = n > 1 && r.level > 1 ? std::log(std::log(static_cast<double>(r.level))) / std::log(n) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

double fitted_lower_constant(const SemigroupBall& s) {
  double c = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 2; m < s.ball.size(); ++m) {
    const double mm = static_cast<double>(m);
    c = std::min(c, std::log2(static_cast<double>(s.ball[m])) * std::log(mm) / std::sqrt(mm));
  }
  return c;
}

}  // namespace ibn
