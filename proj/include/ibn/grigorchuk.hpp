#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ibn {

// Words over {a, b, c, d}; the group acts on the right, x (gh) = (x g) h.
using GrigWord = std::string;

enum class Gen : std::uint8_t { kE = 0, kA = 1, kB = 2, kC = 3, kD = 4 };

Gen gen_from_char(char ch);
char gen_char(Gen g);

// Wreath recursion g = perm <g|0, g|1>, one row per generator.
struct Automaton {
  std::array<bool, 5> swaps{};
  std::array<std::array<Gen, 2>, 5> sections{};
  std::array<bool, 5> fixes_ones{};  // g fixes 1^inf, derived from the table

  // a = e<1,1>, b = <a,c>, c = <a,d>, d = <1,b>
  static Automaton grigorchuk();
  // Same with d = <1,c>; breaks the defining relations.
  static Automaton corrupted();
  void finish();
};

// A point of {0,1}^inf equal to 1 from some level on. Bit i is set iff
// the letter at level i is 0, so 1^inf is 0 and a(1^inf) = 01^inf is 1.
using RayPoint = std::uint64_t;
inline constexpr RayPoint kRootRay = 0;
inline constexpr unsigned kMaxRayDepth = 64;

// x g. Throws std::length_error if a letter beyond `budget` would change.
RayPoint act(Gen g, RayPoint x, const Automaton& m = Automaton::grigorchuk(), unsigned budget = kMaxRayDepth);
RayPoint act(std::string_view w, RayPoint x, const Automaton& m = Automaton::grigorchuk(),
             unsigned budget = kMaxRayDepth);
// The same recursion restricted to the first `depth` letters of x.
std::uint32_t act_finite(Gen g, std::uint32_t x, unsigned depth, const Automaton& m = Automaton::grigorchuk());
std::string ray_to_string(RayPoint x);

// a^2 = b^2 = c^2 = d^2 = 1, bc = cb = d, bd = db = c, cd = dc = b as
// permutations of {0,1}^depth.
bool verify_relations(unsigned depth, const Automaton& m = Automaton::grigorchuk());

// Free reduction with the relations above; the result alternates a and
// letters of {b, c, d}.
GrigWord reduce(std::string_view w);
// Sections of w at the two level-1 subtrees, and the root permutation.
struct Split {
  bool swaps = false;
  GrigWord left, right;
};
Split split(std::string_view w);
bool is_trivial(std::string_view w);
// Brute-force oracle: w fixes every point of {0,1}^depth.
bool acts_trivially(std::string_view w, unsigned depth);

// O(g_1..g_l) = {x0 g_l, x0 g_(l-1) g_l, ..., x0 g_1..g_l}, sorted; {x0}
// for the empty word.
std::vector<RayPoint> inverted_orbit(std::string_view w);
// Same, built by O(wg) = {x0 g} u O(w) g.
std::vector<RayPoint> extend_orbit(const std::vector<RayPoint>& orbit, Gen g, unsigned budget = kMaxRayDepth);
// s[i] = #O(g_1..g_i) for i = 0..l, with s[0] = 1.
std::vector<std::uint32_t> orbit_sizes(std::string_view w);

// Deletes, in order of appearance, maximal trivial segments g_L..g_U with
// #O(g_1..g_U) = #O(g_1..g_(L-1)). `kept` receives the surviving indices.
GrigWord loop_erase(std::string_view w, std::vector<std::uint32_t>* kept = nullptr);
// First (i, j) with g_(i+1)..g_j trivial and s[i] = s[j], or {0, 0}.
std::pair<std::uint32_t, std::uint32_t> find_size_preserving_loop(std::string_view w);

struct SearchResult {
  std::vector<GrigWord> best;            // best[n] has length n, best[0] empty
  std::vector<std::uint32_t> orbit_size; // #O(best[n])
  bool exhaustive = false;
};

inline constexpr std::size_t kDefaultBeam = 256;
inline constexpr std::uint32_t kExhaustiveLimit = 12;

// Beam search over words keyed by their inverted orbit; candidates with
// equal orbits are merged and ties broken by a seeded hash. Lengths up to
// `exhaustive_upto` are searched without a width limit.
SearchResult search_word(std::uint32_t n, std::size_t beam = kDefaultBeam, std::uint64_t seed = 0,
                         unsigned threads = 1, std::uint32_t exhaustive_upto = kExhaustiveLimit);

// xi_1 xi_2 ... xi_K with xi_k = best[2^k].
GrigWord concatenate_blocks(const SearchResult& r, std::uint32_t blocks);

struct BranchMarks {
  std::vector<std::uint32_t> orbit;  // orbit[l] = #O(q_1..q_l), orbit[0] = 0
  std::vector<bool> letter_marks;    // letter_marks[l] for l >= 1: orbit grows at q_l
  std::vector<bool> depth_marks;     // depth_marks[d]: depth-d vertices branch
  std::vector<std::uint32_t> lambda; // lambda[n] = max{l : orbit[l] + l <= n}

  std::uint32_t max_depth() const { return static_cast<std::uint32_t>(depth_marks.size()); }
};

// Tree symbols are q_1, q_2, ... with a branching symbol right after each
// marked letter, so #E_n = 2^orbit[lambda[n]].
BranchMarks branch_marks(std::string_view q, std::uint32_t n);
// Same from an orbit-size sequence with sizes[0] = 0 and steps of 0 or 1.
BranchMarks branch_marks_from_sizes(std::vector<std::uint32_t> sizes, std::uint32_t n);

// Real root of X^3 + X^2 + X - 2 and alpha = log 2 / log(2 / eta).
double bartholdi_erschler_eta();
double bartholdi_erschler_alpha();

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
// Slope of log #O(w_n) against log n over search_word results.
SlopeFit orbit_exponent_estimate(const std::vector<std::uint32_t>& lengths, std::uint64_t seed,
                                 std::size_t beam = kDefaultBeam, unsigned threads = 1);

}  // namespace ibn
