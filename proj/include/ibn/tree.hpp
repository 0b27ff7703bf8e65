#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "ibn/weights.hpp"

namespace ibn {

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

// Rooted ordered tree stored as an arena. Children always have larger ids
// than their parent, so reverse id order is a valid post-order.
class Tree {
 public:
  Tree();

  VertexId root() const { return 0; }
  std::size_t size() const { return parent_.size(); }
  std::uint32_t height() const {
    return static_cast<std::uint32_t>(levels_.size() - 1);
  }

  VertexId add_child(VertexId parent);

  VertexId parent(VertexId v) const { return parent_[v]; }
  std::uint32_t depth(VertexId v) const { return depth_[v]; }
  VertexId first_child(VertexId v) const { return first_child_[v]; }
  VertexId next_sibling(VertexId v) const { return next_sibling_[v]; }
  std::uint32_t child_count(VertexId v) const { return child_count_[v]; }
  bool is_leaf(VertexId v) const { return first_child_[v] == kNoVertex; }
  std::vector<VertexId> children(VertexId v) const;

  // Vertices at depth n in insertion order; empty past the height.
  const std::vector<VertexId>& level_set(std::uint32_t n) const;
  std::size_t level_size(std::uint32_t n) const { return level_set(n).size(); }
  // #B(n) = number of vertices at depth <= n.
  std::size_t ball_size(std::uint32_t n) const;

  bool contains(VertexId v) const { return v < parent_.size(); }
  void reserve(std::size_t n);

  // `<id> <parent-id|-> <depth>` per line, ids consecutive from 0.
  void write(std::ostream& out) const;
  static Tree read(std::istream& in);
  void save(const std::string& path) const;
  static Tree load(const std::string& path);

 private:
  std::vector<VertexId> parent_;
  std::vector<std::uint32_t> depth_;
  std::vector<VertexId> first_child_;
  std::vector<VertexId> last_child_;
  std::vector<VertexId> next_sibling_;
  std::vector<std::uint32_t> child_count_;
  std::vector<std::vector<VertexId>> levels_;
};

// Edges are identified with their child endpoint.
using EdgeRef = VertexId;
using Cutset = std::vector<EdgeRef>;

// True iff every path from the root to a depth-`frontier_depth` vertex
// meets `s` exactly once and `s` has no two comparable edges.
bool is_cutset(const Tree& t, const Cutset& s, std::uint32_t frontier_depth);

// Flow on edges, indexed by child vertex id; entry for the root is ignored.
using FlowAssignment = std::vector<double>;

struct FlowCheck {
  bool valid = false;
  double strength = 0.0;
  std::string message;
};

// Kirchhoff conservation at internal vertices above `frontier_depth` and
// 0 <= theta(e) <= cap(e), both up to relative tolerance `tol`.
FlowCheck check_flow(const Tree& t, const FlowAssignment& theta,
                     const EdgeWeightProfile& cap, std::uint32_t frontier_depth,
                     double tol = 1e-9);
FlowCheck check_flow(const Tree& t, const FlowAssignment& theta,
                     const EdgeWeightProfile& cap);

}  // namespace ibn
