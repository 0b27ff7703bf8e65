#include <sstream>

#include "doctest.h"
#include "ibn/generators.hpp"
#include "ibn/tree.hpp"
#include "support.hpp"

using namespace ibn;

TEST_CASE("add_child maintains depth and order") {
  Tree t;
  const VertexId a = t.add_child(t.root());
  CHECK(t.depth(a) == 1);
  const VertexId b = t.add_child(t.root());
  CHECK(t.level_set(1) == std::vector<VertexId>{a, b});
  CHECK(t.children(t.root()) == std::vector<VertexId>{a, b});
  VertexId v = a;
  for (int i = 0; i < 4; ++i) v = t.add_child(v);
  CHECK(t.depth(v) == 5);
  CHECK(t.height() == 5);
  CHECK_THROWS_AS(t.add_child(999), std::out_of_range);
}

TEST_CASE("level sets") {
  Tree bin = spherically_symmetric(constant_degrees(2), 4);
  CHECK(bin.level_set(0) == std::vector<VertexId>{0});
  CHECK(bin.level_size(3) == 8);
  CHECK(bin.level_size(9) == 0);
  Tree seq = spherically_symmetric(sequence_degrees(), 8);
  CHECK(seq.level_size(6) == 4);
}

TEST_CASE("is_cutset") {
  Tree bin = spherically_symmetric(constant_degrees(2), 4);
  for (std::uint32_t n = 1; n <= 4; ++n) {
    const auto& lv = bin.level_set(n);
    CHECK(is_cutset(bin, Cutset(lv.begin(), lv.end()), 4));
  }
  CHECK_FALSE(is_cutset(bin, {}, 4));
  const VertexId a = bin.level_set(1)[0];
  const VertexId child = bin.first_child(a);
  CHECK_FALSE(is_cutset(bin, {a, child, bin.level_set(1)[1]}, 4));
  // mixed-depth cut
  Cutset mixed{bin.level_set(1)[1]};
  for (VertexId c : bin.children(a)) mixed.push_back(c);
  CHECK(is_cutset(bin, mixed, 4));
  mixed.pop_back();
  CHECK_FALSE(is_cutset(bin, mixed, 4));
}

TEST_CASE("check_flow") {
  Tree p = path_tree(5);
  FlowAssignment zero(p.size(), 0.0);
  auto r = check_flow(p, zero, EdgeWeightProfile::unit());
  CHECK(r.valid);
  CHECK(r.strength == 0.0);
  FlowAssignment unit(p.size(), 1.0);
  r = check_flow(p, unit, EdgeWeightProfile::unit());
  CHECK(r.valid);
  CHECK(r.strength == 1.0);
  r = check_flow(p, unit, EdgeWeightProfile::ibn(0.5));
  CHECK_FALSE(r.valid);
  FlowAssignment short_flow(2, 0.0);
  CHECK_THROWS(check_flow(p, short_flow, EdgeWeightProfile::unit()));
}

TEST_CASE("perturbing a valid flow at one internal vertex is rejected") {
  CounterRng rng(11, 0);
  Tree bin = spherically_symmetric(constant_degrees(2), 6);
  FlowAssignment theta(bin.size(), 0.0);
  for (VertexId v = 1; v < bin.size(); ++v) theta[v] = std::ldexp(1e-3, -static_cast<int>(bin.depth(v)));
  REQUIRE(check_flow(bin, theta, EdgeWeightProfile::unit()).valid);
  for (int trial = 0; trial < 50; ++trial) {
    FlowAssignment bad = theta;
    const auto v = static_cast<VertexId>(1 + rng.below(bin.size() - 1));
    if (bin.depth(v) == 6) continue;
    bad[v] *= 1.0 + 0.01 * (1.0 + rng.uniform());
    CHECK_FALSE(check_flow(bin, bad, EdgeWeightProfile::unit()).valid);
  }
}

TEST_CASE("serialization round trip") {
  CounterRng rng(3, 0);
  Tree t = testing::random_tree(rng, 5, 40);
  std::stringstream ss;
  t.write(ss);
  Tree u = Tree::read(ss);
  REQUIRE(u.size() == t.size());
  for (VertexId v = 1; v < t.size(); ++v) {
    CHECK(u.parent(v) == t.parent(v));
    CHECK(u.depth(v) == t.depth(v));
  }
  std::stringstream first;
  first << "0 - 0\n1 0 1\n2 0 1\n";
  CHECK(Tree::read(first).size() == 3);
  std::stringstream bad_depth("0 - 0\n1 0 2\n");
  CHECK_THROWS(Tree::read(bad_depth));
  std::stringstream bad_order("0 - 0\n1 2 1\n");
  CHECK_THROWS(Tree::read(bad_order));
}
