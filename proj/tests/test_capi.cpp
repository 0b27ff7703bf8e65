#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "ibn/ibn.h"

namespace {

struct Tree {
  ibn_tree* t = nullptr;
  ~Tree() { ibn_tree_free(t); }
};

struct Bracket {
  ibn_bracket* b = nullptr;
  ~Bracket() { ibn_bracket_free(b); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  ibn_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status strings and version") {
  CHECK(std::strlen(ibn_version()) > 0);
  for (int s = IBN_OK; s <= IBN_ERR_INTERNAL; ++s) CHECK(std::strlen(ibn_status_string(static_cast<ibn_status>(s))) > 0);
  CHECK(std::string(ibn_verdict_name(IBN_BELOW)) == "below");
  CHECK(std::string(ibn_verdict_name(IBN_ABOVE)) == "above");
  CHECK(std::string(ibn_verdict_name(IBN_UNDECIDED)) == "undecided");
}

TEST_CASE("null handles are tolerated by free functions") {
  ibn_tree_free(nullptr);
  ibn_bracket_free(nullptr);
  ibn_semigroup_free(nullptr);
  ibn_grig_words_free(nullptr);
  ibn_string_free(nullptr);
  CHECK(ibn_bracket_size(nullptr) == 0);
  CHECK(ibn_bracket_consistent(nullptr) == 0);
}

TEST_CASE("argument errors set the last error") {
  Tree t;
  CHECK(ibn_tree_family("no-such-family", 10, &t.t) == IBN_ERR_INVALID_ARGUMENT);
  CHECK(t.t == nullptr);
  CHECK(std::strlen(ibn_last_error()) > 0);
  CHECK(ibn_tree_family(nullptr, 10, &t.t) == IBN_ERR_INVALID_ARGUMENT);
  CHECK(ibn_tree_family("seq", 10, nullptr) == IBN_ERR_INVALID_ARGUMENT);
  uint32_t h = 0;
  CHECK(ibn_tree_horizon(nullptr, &h) == IBN_ERR_INVALID_ARGUMENT);

  REQUIRE(ibn_tree_family("binary", 10, &t.t) == IBN_OK);
  CHECK(std::strlen(ibn_last_error()) == 0);
  CHECK(ibn_tree_horizon(t.t, nullptr) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("last error is per thread") {
  Tree t;
  CHECK(ibn_tree_family("bogus", 3, &t.t) != IBN_OK);
  const std::string here = ibn_last_error();
  std::string there = "unset";
  std::thread th([&] {
    Tree u;
    ibn_tree_family("path", 3, &u.t);
    there = ibn_last_error();
  });
  th.join();
  CHECK(there.empty());
  CHECK(ibn_last_error() == here);
}

TEST_CASE("family trees, level counts and materialization") {
  Tree t;
  REQUIRE(ibn_tree_family("binary", 10, &t.t) == IBN_OK);
  uint32_t h = 0;
  REQUIRE(ibn_tree_horizon(t.t, &h) == IBN_OK);
  CHECK(h == 10);
  double lc = 0;
  REQUIRE(ibn_tree_log_level_count(t.t, 7, &lc) == IBN_OK);
  CHECK(lc == doctest::Approx(7 * std::log(2.0)));
  double vc = 0;
  REQUIRE(ibn_tree_vertex_count(t.t, &vc) == IBN_OK);
  CHECK(vc == doctest::Approx(2047));
  int implicit = -1;
  REQUIRE(ibn_tree_is_implicit(t.t, &implicit) == IBN_OK);
  CHECK(implicit == 1);

  Tree m;
  REQUIRE(ibn_tree_materialize(t.t, 0, &m.t) == IBN_OK);
  REQUIRE(ibn_tree_is_implicit(m.t, &implicit) == IBN_OK);
  CHECK(implicit == 0);
  REQUIRE(ibn_tree_vertex_count(m.t, &vc) == IBN_OK);
  CHECK(vc == 2047);

  Tree small;
  CHECK(ibn_tree_materialize(t.t, 100, &small.t) == IBN_ERR_CAPACITY);
  CHECK(small.t == nullptr);
}

TEST_CASE("save and load round trip") {
  Tree t;
  REQUIRE(ibn_tree_family("three-one", 6, &t.t) == IBN_OK);
  const std::string path = "capi_roundtrip.tree";
  REQUIRE(ibn_tree_save(t.t, path.c_str(), 0) == IBN_OK);
  Tree back;
  REQUIRE(ibn_tree_load(path.c_str(), &back.t) == IBN_OK);
  double a = 0, b = 0;
  ibn_tree_vertex_count(t.t, &a);
  ibn_tree_vertex_count(back.t, &b);
  CHECK(a == b);
  for (uint32_t n = 0; n <= 6; ++n) {
    ibn_tree_log_level_count(t.t, n, &a);
    ibn_tree_log_level_count(back.t, n, &b);
    CHECK(a == doctest::Approx(b));
  }
  std::remove(path.c_str());
  Tree missing;
  CHECK(ibn_tree_load("does/not/exist.tree", &missing.t) != IBN_OK);
}

TEST_CASE("marks build a spherical tree") {
  const uint8_t marks[] = {1, 0, 1, 1, 0};
  Tree t;
  REQUIRE(ibn_tree_from_marks(marks, 5, &t.t) == IBN_OK);
  double lc = 0;
  ibn_tree_log_level_count(t.t, 5, &lc);
  CHECK(lc == doctest::Approx(3 * std::log(2.0)));
  CHECK(ibn_tree_from_marks(nullptr, 5, &t.t) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("min cut on the path is the deepest edge") {
  Tree t;
  REQUIRE(ibn_tree_family("path", 16, &t.t) == IBN_OK);
  double c = 0;
  REQUIRE(ibn_log_min_cut(t.t, 0.5, 16, &c) == IBN_OK);
  CHECK(c == doctest::Approx(-4.0));
}

TEST_CASE("ibn bracket on the sequence tree") {
  Tree t;
  REQUIRE(ibn_tree_family("seq", 512, &t.t) == IBN_OK);
  Bracket b;
  REQUIRE(ibn_estimate_ibn(t.t, {nullptr, 0}, {nullptr, 0, 0, 0}, &b.b) == IBN_OK);
  double lo = 0, hi = 0;
  REQUIRE(ibn_bracket_lo(b.b, &lo) == 1);
  REQUIRE(ibn_bracket_hi(b.b, &hi) == 1);
  CHECK(lo <= 0.5);
  CHECK(hi >= 0.5);
  CHECK(ibn_bracket_consistent(b.b) == 1);
  CHECK(ibn_bracket_size(b.b) == 19);
  double p = 0;
  ibn_verdict v;
  REQUIRE(ibn_bracket_point(b.b, 0, &p, &v) == IBN_OK);
  CHECK(p == doctest::Approx(0.05));
  CHECK(v == IBN_BELOW);
  CHECK(ibn_bracket_point(b.b, 19, &p, &v) == IBN_ERR_OUT_OF_RANGE);
  CHECK(ibn_bracket_value_count(b.b, 0) > 0);
  double x = 0;
  CHECK(ibn_bracket_value(b.b, 0, 1000, &x) == IBN_ERR_OUT_OF_RANGE);
  char* d = nullptr;
  REQUIRE(ibn_bracket_describe(b.b, &d) == IBN_OK);
  CHECK(take(d).front() == '[');

  const uint32_t bad[] = {64, 32};
  Bracket b2;
  CHECK(ibn_estimate_ibn(t.t, {nullptr, 0}, {bad, 2, 0, 0}, &b2.b) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("walks are reproducible and stats match trials") {
  Tree t;
  REQUIRE(ibn_tree_family("seq", 64, &t.t) == IBN_OK);
  std::vector<ibn_walk_trial> a(300), b(300);
  ibn_walk_stats sa{}, sb{};
  REQUIRE(ibn_walk(t.t, 0.5, 300, 100000, 7, 1, 0, &sa, a.data()) == IBN_OK);
  REQUIRE(ibn_walk(t.t, 0.5, 300, 100000, 7, 2, 0, &sb, b.data()) == IBN_OK);
  uint64_t ret = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].returned == b[i].returned);
    CHECK(a[i].steps == b[i].steps);
    CHECK(a[i].max_depth == b[i].max_depth);
    ret += a[i].returned;
  }
  CHECK(sa.trials == 300);
  CHECK(sa.returned == ret);
  CHECK(sa.wilson_lo <= sa.frequency);
  CHECK(sa.frequency <= sa.wilson_hi);
  ibn_walk_stats sc{};
  CHECK(ibn_walk(t.t, 0.5, 10, 1000, 7, 1, 0, &sc, nullptr) == IBN_OK);
  CHECK(ibn_walk(nullptr, 0.5, 10, 1000, 7, 1, 0, &sc, nullptr) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("percolation rows") {
  Tree t;
  REQUIRE(ibn_tree_family("seq", 64, &t.t) == IBN_OK);
  ibn_percolation_row row{};
  REQUIRE(ibn_percolation(t.t, 0.3, 32, 0, 1, 1, 0, &row) == IBN_OK);
  CHECK(std::isnan(row.mc));
  CHECK(std::isnan(row.mc_stderr));
  CHECK(row.bound <= std::exp(row.log_exact) * (1 + 1e-12));
  REQUIRE(ibn_percolation(t.t, 0.3, 32, 2000, 1, 1, 0, &row) == IBN_OK);
  CHECK(row.mc == doctest::Approx(row.mc_hits / 2000.0));
  CHECK(ibn_percolation(t.t, 0.3, 32, 0, 1, 1, 0, nullptr) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("firefighting reports a reason on failure") {
  Tree t;
  REQUIRE(ibn_tree_family("seq", 256, &t.t) == IBN_OK);
  ibn_fire_run run{};
  char* reason = nullptr;
  REQUIRE(ibn_firefight(t.t, 2, 0.8, 1.0, 200, &run, &reason) == IBN_OK);
  CHECK(run.contained == 1);
  take(reason);
  reason = nullptr;
  REQUIRE(ibn_firefight(t.t, 2, 0.2, 1.0, 200, &run, &reason) == IBN_OK);
  CHECK(run.contained == 0);
  CHECK(take(reason).find("horizon") != std::string::npos);
  CHECK(ibn_firefight(nullptr, 2, 0.5, 1.0, 200, &run, nullptr) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("semigroup handle") {
  ibn_semigroup* s = nullptr;
  REQUIRE(ibn_semigroup_build(12, 0, &s) == IBN_OK);
  uint32_t d = 0;
  ibn_semigroup_depth(s, &d);
  CHECK(d == 12);
  ibn_growth_row row{};
  REQUIRE(ibn_semigroup_row(s, 1, &row) == IBN_OK);
  CHECK(row.ball == 2);
  CHECK(row.level == 2);
  CHECK(ibn_semigroup_row(s, 13, &row) == IBN_ERR_OUT_OF_RANGE);
  uint64_t counts[4];
  REQUIRE(ibn_semigroup_word_types(s, 12, counts) == IBN_OK);
  CHECK(counts[3] == 0);
  ibn_tree* t = nullptr;
  REQUIRE(ibn_semigroup_tree(s, &t) == IBN_OK);
  double lc = 0;
  ibn_tree_log_level_count(t, 1, &lc);
  CHECK(lc == doctest::Approx(std::log(2.0)));
  ibn_tree_free(t);
  ibn_semigroup_free(s);

  s = nullptr;
  CHECK(ibn_semigroup_build(40, 100, &s) == IBN_ERR_CAPACITY);
  CHECK(s == nullptr);
}

TEST_CASE("grigorchuk functions") {
  int ok = 0;
  REQUIRE(ibn_grig_verify_relations(8, 0, &ok) == IBN_OK);
  CHECK(ok == 1);
  REQUIRE(ibn_grig_verify_relations(8, 1, &ok) == IBN_OK);
  CHECK(ok == 0);
  CHECK(ibn_grig_verify_relations(0, 0, &ok) != IBN_OK);

  int triv = -1;
  ibn_grig_is_trivial("aa", &triv);
  CHECK(triv == 1);
  ibn_grig_is_trivial("ab", &triv);
  CHECK(triv == 0);
  CHECK(ibn_grig_is_trivial("ax", &triv) == IBN_ERR_INVALID_ARGUMENT);

  char* e = nullptr;
  REQUIRE(ibn_grig_loop_erase("aaaa", &e) == IBN_OK);
  CHECK(take(e) == "aa");

  size_t len = 0;
  REQUIRE(ibn_grig_orbit_sizes("abab", nullptr, 0, &len) == IBN_OK);
  CHECK(len == 5);
  std::vector<uint32_t> sizes(2);
  REQUIRE(ibn_grig_orbit_sizes("abab", sizes.data(), sizes.size(), &len) == IBN_OK);
  CHECK(sizes[0] == 1);

  uint32_t depth = 0;
  REQUIRE(ibn_grig_mark_depth("abab", &depth) == IBN_OK);
  std::vector<uint8_t> marks(depth);
  REQUIRE(ibn_grig_branch_marks("abab", depth, marks.data()) == IBN_OK);
  CHECK(ibn_grig_branch_marks("abab", depth + 1, marks.data()) == IBN_ERR_CAPACITY);

  ibn_grig_words* w = nullptr;
  REQUIRE(ibn_grig_search(16, 0, 1, 1, &w) == IBN_OK);
  char* best = nullptr;
  uint32_t size = 0;
  REQUIRE(ibn_grig_words_best(w, 1, &best, &size) == IBN_OK);
  CHECK(take(best) == "a");
  CHECK(size == 1);
  CHECK(ibn_grig_words_best(w, 17, &best, &size) == IBN_ERR_OUT_OF_RANGE);
  char* cat = nullptr;
  REQUIRE(ibn_grig_words_concatenate(w, 4, &cat) == IBN_OK);
  CHECK(take(cat).size() == 2 + 4 + 8 + 16);
  CHECK(ibn_grig_words_concatenate(w, 5, &cat) == IBN_ERR_OUT_OF_RANGE);
  ibn_grig_words_free(w);

  double eta = 0, alpha = 0;
  REQUIRE(ibn_grig_constants(&eta, &alpha) == IBN_OK);
  CHECK(eta * eta * eta + eta * eta + eta - 2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(alpha == doctest::Approx(0.7674).epsilon(1e-4));
}

TEST_CASE("log-log fit") {
  const double x[] = {1, 2, 4, 8};
  const double y[] = {3, 6, 12, 24};
  double slope = 0, icpt = 0;
  REQUIRE(ibn_fit_loglog(x, y, 4, &slope, &icpt) == IBN_OK);
  CHECK(slope == doctest::Approx(1.0));
  CHECK(icpt == doctest::Approx(std::log(3.0)));
  CHECK(ibn_fit_loglog(x, y, 2, &slope, &icpt) != IBN_OK);
  CHECK(ibn_fit_loglog(nullptr, y, 4, &slope, &icpt) == IBN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("conductance sampler KS distance") {
  double ks = 1;
  REQUIRE(ibn_conductance_ks(0.5, 20000, 3, &ks) == IBN_OK);
  CHECK(ks < 1.63 / std::sqrt(20000.0));
}
