#include "ibn/tree.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ibn {

// ---- EdgeWeightProfile -------------------------------------------------

EdgeWeightProfile EdgeWeightProfile::from_depth_rule(DepthRule log_rule,
                                                     std::string name) {
  EdgeWeightProfile p;
  p.rule_ = std::move(log_rule);
  p.name_ = std::move(name);
  return p;
}

EdgeWeightProfile EdgeWeightProfile::from_edges(std::vector<double> log_weights,
                                                std::string name) {
  EdgeWeightProfile p;
  p.per_edge_ = std::move(log_weights);
  p.name_ = std::move(name);
  return p;
}

EdgeWeightProfile EdgeWeightProfile::ibn(double lambda) {
  return from_depth_rule(
      [lambda](std::uint32_t n) { return -std::pow(static_cast<double>(n), lambda); },
      "ibn");
}

EdgeWeightProfile EdgeWeightProfile::percolation(double lambda) {
  return from_depth_rule(
      [lambda](std::uint32_t n) {
        return -std::pow(static_cast<double>(n), lambda - 1.0);
      },
      "percolation");
}

EdgeWeightProfile EdgeWeightProfile::unit() {
  return from_depth_rule([](std::uint32_t) { return 0.0; }, "unit");
}

double EdgeWeightProfile::log_weight(VertexId v, std::uint32_t depth) const {
  if (rule_) return rule_(depth);
  if (v >= per_edge_.size()) throw std::out_of_range("edge weight missing for vertex");
  return per_edge_[v];
}

double EdgeWeightProfile::weight(VertexId v, std::uint32_t depth) const {
  return std::exp(log_weight(v, depth));
}

double EdgeWeightProfile::log_weight_at_depth(std::uint32_t depth) const {
  if (!rule_) throw std::logic_error("profile is not a depth rule");
  return rule_(depth);
}

std::vector<double> EdgeWeightProfile::depth_table(std::uint32_t n) const {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::uint32_t d = 1; d <= n; ++d) out[d] = log_weight_at_depth(d);
  return out;
}

EdgeWeightProfile EdgeWeightProfile::pow(double gamma) const {
  if (rule_) {
    auto inner = rule_;
    return from_depth_rule(
        [inner, gamma](std::uint32_t n) { return gamma * inner(n); }, name_ + "^g");
  }
  std::vector<double> w(per_edge_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = gamma * per_edge_[i];
  return from_edges(std::move(w), name_ + "^g");
}

// ---- Tree --------------------------------------------------------------

Tree::Tree() {
  parent_.push_back(kNoVertex);
  depth_.push_back(0);
  first_child_.push_back(kNoVertex);
  last_child_.push_back(kNoVertex);
  next_sibling_.push_back(kNoVertex);
  child_count_.push_back(0);
  levels_.push_back({0});
}

void Tree::reserve(std::size_t n) {
  parent_.reserve(n);
  depth_.reserve(n);
  first_child_.reserve(n);
  last_child_.reserve(n);
  next_sibling_.reserve(n);
  child_count_.reserve(n);
}

VertexId Tree::add_child(VertexId parent) {
  if (parent >= parent_.size()) throw std::out_of_range("unknown parent id");
  if (parent_.size() >= kNoVertex) throw std::length_error("tree too large");
  const auto v = static_cast<VertexId>(parent_.size());
  const std::uint32_t d = depth_[parent] + 1;
  parent_.push_back(parent);
  depth_.push_back(d);
  first_child_.push_back(kNoVertex);
  last_child_.push_back(kNoVertex);
  next_sibling_.push_back(kNoVertex);
  child_count_.push_back(0);
  if (last_child_[parent] == kNoVertex) {
    first_child_[parent] = v;
  } else {
    next_sibling_[last_child_[parent]] = v;
  }
  last_child_[parent] = v;
  ++child_count_[parent];
  if (levels_.size() <= d) levels_.resize(d + 1);
  levels_[d].push_back(v);
  return v;
}

std::vector<VertexId> Tree::children(VertexId v) const {
  std::vector<VertexId> out;
  out.reserve(child_count_[v]);
  for (VertexId c = first_child_[v]; c != kNoVertex; c = next_sibling_[c]) out.push_back(c);
  return out;
}

const std::vector<VertexId>& Tree::level_set(std::uint32_t n) const {
  static const std::vector<VertexId> kEmpty;
  return n < levels_.size() ? levels_[n] : kEmpty;
}

std::size_t Tree::ball_size(std::uint32_t n) const {
  std::size_t total = 0;
  for (std::uint32_t d = 0; d <= n && d < levels_.size(); ++d) total += levels_[d].size();
  return total;
}

void Tree::write(std::ostream& out) const {
  for (VertexId v = 0; v < parent_.size(); ++v) {
    out << v << ' ';
    if (parent_[v] == kNoVertex) {
      out << '-';
    } else {
      out << parent_[v];
    }
    out << ' ' << depth_[v] << '\n';
  }
}

Tree Tree::read(std::istream& in) {
  Tree t;
  std::string line;
  std::size_t line_no = 0;
  bool saw_root = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::uint64_t id = 0, depth = 0;
    std::string parent;
    if (!(ls >> id >> parent >> depth)) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed vertex record");
    }
    if (!saw_root) {
      if (id != 0 || parent != "-" || depth != 0) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": first record must be `0 - 0`");
      }
      saw_root = true;
      continue;
    }
    if (id != t.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": ids must be consecutive");
    }
    std::uint64_t p = 0;
    try {
      p = std::stoull(parent);
    } catch (const std::exception&) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad parent id");
    }
    if (p >= id) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": parent must precede child");
    }
    const VertexId v = t.add_child(static_cast<VertexId>(p));
    if (t.depth(v) != depth) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": depth inconsistent with parent");
    }
  }
  if (!saw_root) throw std::runtime_error("empty tree file");
  return t;
}

void Tree::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write(out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Tree Tree::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read(in);
}

// ---- cutsets and flows -------------------------------------------------

bool is_cutset(const Tree& t, const Cutset& s, std::uint32_t frontier_depth) {
  std::vector<std::uint8_t> in_set(t.size(), 0);
  for (EdgeRef e : s) {
    if (!t.contains(e) || e == t.root()) return false;
    if (t.depth(e) > frontier_depth) return false;
    if (in_set[e]) return false;
    in_set[e] = 1;
  }
  // hits[v] = number of set edges on the path root..v
  std::vector<std::uint32_t> hits(t.size(), 0);
  for (VertexId v = 1; v < t.size(); ++v) {
    hits[v] = hits[t.parent(v)] + in_set[v];
    if (hits[v] > 1) return false;
  }
  for (VertexId v : t.level_set(frontier_depth)) {
    if (hits[v] != 1) return false;
  }
  return true;
}

FlowCheck check_flow(const Tree& t, const FlowAssignment& theta,
                     const EdgeWeightProfile& cap, std::uint32_t frontier_depth,
                     double tol) {
  FlowCheck r;
  if (theta.size() != t.size()) {
    throw std::invalid_argument("flow assignment size does not match tree");
  }
  for (VertexId v = 1; v < t.size(); ++v) {
    const double x = theta[v];
    if (!std::isfinite(x)) throw std::invalid_argument("flow value missing at vertex " + std::to_string(v));
    if (x < 0.0) {
      r.message = "negative flow at vertex " + std::to_string(v);
      return r;
    }
    if (t.depth(v) > frontier_depth) continue;
    const double c = cap.weight(v, t.depth(v));
    if (x > c * (1.0 + tol)) {
      r.message = "capacity exceeded at vertex " + std::to_string(v);
      return r;
    }
  }
  for (VertexId v = 1; v < t.size(); ++v) {
    if (t.depth(v) >= frontier_depth) continue;
    double out = 0.0;
    for (VertexId c = t.first_child(v); c != kNoVertex; c = t.next_sibling(c)) out += theta[c];
    const double in = theta[v];
    if (std::abs(in - out) > tol * std::max(in, out)) {
      r.message = "conservation violated at vertex " + std::to_string(v);
      return r;
    }
  }
  for (VertexId c = t.first_child(t.root()); c != kNoVertex; c = t.next_sibling(c)) {
    r.strength += theta[c];
  }
  r.valid = true;
  return r;
}

FlowCheck check_flow(const Tree& t, const FlowAssignment& theta,
                     const EdgeWeightProfile& cap) {
  return check_flow(t, theta, cap, t.height());
}

}  // namespace ibn
