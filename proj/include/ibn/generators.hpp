#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ibn/tree.hpp"

namespace ibn {

inline constexpr std::size_t kDefaultVertexCap = 60'000'000;

struct DegreeSequence {
  std::function<std::uint32_t(std::uint64_t)> rule;  // children of a depth-n vertex
  std::string name;
};

// a_n = 2 iff n = k + k(k+1)/2 for some k >= 1, else 1 (n >= 1).
std::uint32_t branching_sequence(std::uint64_t n);

// Root has one child, depth-n vertices have branching_sequence(n) children.
DegreeSequence sequence_degrees();
DegreeSequence constant_degrees(std::uint32_t k);
// Two children at depth n iff marks[n], one otherwise (false past the end).
DegreeSequence marks_degrees(std::vector<bool> marks);

// Implicit depth-N truncation of a spherically symmetric tree.
class SphericalTree {
 public:
  SphericalTree(const DegreeSequence& d, std::uint32_t horizon);
  explicit SphericalTree(std::vector<std::uint32_t> degrees);

  std::uint32_t horizon() const { return static_cast<std::uint32_t>(degree_.size()); }
  std::uint32_t degree(std::uint32_t n) const { return n < degree_.size() ? degree_[n] : 0; }
  const std::vector<std::uint32_t>& degrees() const { return degree_; }

  // Natural log of #E_n.
  double log_level_count(std::uint32_t n) const { return log_count_.at(n); }
  // Exact #E_n, or nullopt when it does not fit in 64 bits.
  std::optional<std::uint64_t> level_count(std::uint32_t n) const;
  // Natural log of #B(n).
  double log_ball(std::uint32_t n) const;
  // Estimated number of vertices of the materialized truncation.
  double vertex_count() const;

  Tree materialize(std::size_t vertex_cap = kDefaultVertexCap) const;

 private:
  void fill_logs();

  std::vector<std::uint32_t> degree_;
  std::vector<double> log_count_;
};

Tree spherically_symmetric(const DegreeSequence& d, std::uint32_t n,
                           std::size_t vertex_cap = kDefaultVertexCap);

// The 3-1 tree with each base edge at distance n stretched into a path of
// n edges, truncated at depth N. Base level n has 2^n vertices; vertex i
// has one child when i < 2^(n-1) and three otherwise; the root has two.
class ThreeOneTree {
 public:
  explicit ThreeOneTree(std::uint32_t horizon) : horizon_(horizon) {}

  std::uint32_t horizon() const { return horizon_; }
  // Base level whose stretched edges cover depth d (d >= 1).
  static std::uint32_t base_level(std::uint32_t d);
  // Depth of base level n: n(n+1)/2.
  static std::uint64_t base_depth(std::uint32_t n) {
    return static_cast<std::uint64_t>(n) * (n + 1) / 2;
  }
  double log_level_count(std::uint32_t d) const;
  double vertex_count() const;
  Tree materialize(std::size_t vertex_cap = kDefaultVertexCap) const;

 private:
  std::uint32_t horizon_;
};

Tree three_one_stretched(std::uint32_t n, std::size_t vertex_cap = kDefaultVertexCap);

Tree from_branch_marks(const std::vector<bool>& marks, std::uint32_t n,
                       std::size_t vertex_cap = kDefaultVertexCap);

Tree path_tree(std::uint32_t n);

// A tree family in whichever representation its algorithms need.
using TreeSource = std::variant<SphericalTree, ThreeOneTree, std::shared_ptr<const Tree>>;

std::uint32_t source_horizon(const TreeSource& s);
double source_log_level_count(const TreeSource& s, std::uint32_t n);

// Named families: seq, binary, path, three-one. Spherical families are
// implicit; three-one is implicit for cuts and level counts.
TreeSource make_family(const std::string& family, std::uint32_t horizon);

}  // namespace ibn
