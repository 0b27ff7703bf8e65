#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ibn/tree.hpp"

namespace ibn {

using BigInt = boost::multiprecision::cpp_int;

// 2x2 matrix [[a, b], [c, d]] with exact entries.
struct Mat2 {
  BigInt a, b, c, d;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  static Mat2 gen_a() { return {1, 1, 0, 1}; }
  static Mat2 gen_b() { return {1, 0, 1, 0}; }
  bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
  Mat2 scaled(const BigInt& k) const { return {a * k, b * k, c * k, d * k}; }
};

struct Mat2Hash {
  std::size_t operator()(const Mat2& m) const;
};

Mat2 mat_mul(const Mat2& x, const Mat2& y);
// Product of the generators spelled by `w` (letters 'a' and 'b').
Mat2 word_matrix(std::string_view w);

// Ball of the semigroup generated by a and b, built breadth first with
// b tried before a, so each element keeps its shortest, then lex-least
// (b < a) word. The BFS tree is the lexicographic minimal spanning tree.
struct SemigroupBall {
  Tree tree;                       // vertex 0 is the identity
  std::vector<char> letter;        // last letter of each vertex's word
  std::vector<Mat2> matrix;
  std::vector<std::uint64_t> ball; // ball[n] = #elements of length <= n, identity excluded

  std::string word(VertexId v) const;
};

inline constexpr std::size_t kDefaultElementCap = 8'000'000;

SemigroupBall bfs_ball(std::uint32_t n, std::size_t element_cap = kDefaultElementCap);

// 2 n^(2 sqrt(n) + 2), compared in log space.
bool ball_upper_bound_holds(std::uint32_t n, std::uint64_t count);

enum class WordType { kPower, kSingleB, kPrimeBlocks, kOther };
const char* word_type_name(WordType t);
// a^n; a^i b a^j; or a^i (b a^(p1-1))^r1 ... (b a^(pk-1))^rk b a^j with
// primes p1 < ... < pk.
WordType classify_word(std::string_view w);

bool is_prime(std::uint64_t n);

// Flow from the identity: 0 into a, c into b; at a vertex ending in
// b a^(p-1) with p prime and larger than every prime met so far on its
// path, the flow splits equally between the two children; otherwise it
// continues along a.
FlowAssignment prime_flow(const SemigroupBall& s, double c);
// Largest c for which prime_flow(s, c) <= exp(-|e|^lambda) on edges of
// depth <= n.
double max_prime_flow_scale(const SemigroupBall& s, double lambda, std::uint32_t n);

struct GrowthRow {
  std::uint32_t n = 0;
  std::uint64_t ball = 0;
  std::uint64_t level = 0;
  double loglog_ratio = 0.0;  // log log #E_n / log n
};

std::vector<GrowthRow> growth_stats(const SemigroupBall& s);
// Largest c with 2^(c sqrt(m) / log m) <= #B(m) for all 2 <= m <= n.
double fitted_lower_constant(const SemigroupBall& s);

}  // namespace ibn
