#include "ibn/generators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ibn {

namespace {

void check_cap(double estimate, std::size_t cap) {
  if (estimate > static_cast<double>(cap)) {
    throw std::length_error("estimated " + std::to_string(static_cast<long double>(estimate)) +
                            " vertices exceeds cap " + std::to_string(cap));
  }
}

}  // namespace

std::uint32_t branching_sequence(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("branching_sequence is defined for n >= 1");
  // k + k(k+1)/2 = n  <=>  k^2 + 3k - 2n = 0
  const double disc = 9.0 + 8.0 * static_cast<double>(n);
  auto k = static_cast<std::uint64_t>((std::sqrt(disc) - 3.0) / 2.0);
  for (std::uint64_t c = (k > 0 ? k - 1 : 0); c <= k + 1; ++c) {
    if (c >= 1 && c + c * (c + 1) / 2 == n) return 2;
  }
  return 1;
}

DegreeSequence sequence_degrees() {
  return {[](std::uint64_t n) -> std::uint32_t { return n == 0 ? 1 : branching_sequence(n); }, "seq"};
}

DegreeSequence constant_degrees(std::uint32_t k) {
  return {[k](std::uint64_t) { return k; }, "constant-" + std::to_string(k)};
}

DegreeSequence marks_degrees(std::vector<bool> marks) {
  auto m = std::make_shared<const std::vector<bool>>(std::move(marks));
  return {[m](std::uint64_t n) -> std::uint32_t { return n < m->size() && (*m)[n] ? 2 : 1; },
          "marks"};
}

// ---- SphericalTree -----------------------------------------------------

SphericalTree::SphericalTree(const DegreeSequence& d, std::uint32_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  degree_.resize(horizon);
  for (std::uint32_t n = 0; n < horizon; ++n) {
    degree_[n] = d.rule(n);
    if (degree_[n] == 0) {
      throw std::invalid_argument("degree sequence vanishes at depth " + std::to_string(n));
    }
  }
  fill_logs();
}

SphericalTree::SphericalTree(std::vector<std::uint32_t> degrees) : degree_(std::move(degrees)) {
  if (degree_.empty()) throw std::invalid_argument("horizon must be >= 1");
  for (std::size_t n = 0; n < degree_.size(); ++n) {
    if (degree_[n] == 0) {
      throw std::invalid_argument("degree sequence vanishes at depth " + std::to_string(n));
    }
  }
  fill_logs();
}

void SphericalTree::fill_logs() {
  log_count_.assign(degree_.size() + 1, 0.0);
  for (std::size_t n = 0; n < degree_.size(); ++n) {
    log_count_[n + 1] = log_count_[n] + std::log(static_cast<double>(degree_[n]));
  }
}

std::optional<std::uint64_t> SphericalTree::level_count(std::uint32_t n) const {
  if (n > horizon()) return 0;
  std::uint64_t c = 1;
  for (std::uint32_t k = 0; k < n; ++k) {
    if (__builtin_mul_overflow(c, static_cast<std::uint64_t>(degree_[k]), &c)) return std::nullopt;
  }
  return c;
}

double SphericalTree::log_ball(std::uint32_t n) const {
  n = std::min(n, horizon());
  double m = log_count_[n];
  for (std::uint32_t k = 0; k <= n; ++k) m = std::max(m, log_count_[k]);
  double s = 0.0;
  for (std::uint32_t k = 0; k <= n; ++k) s += std::exp(log_count_[k] - m);
  return m + std::log(s);
}

double SphericalTree::vertex_count() const { return std::exp(log_ball(horizon())); }

Tree SphericalTree::materialize(std::size_t vertex_cap) const {
  check_cap(vertex_count(), vertex_cap);
  Tree t;
  t.reserve(static_cast<std::size_t>(vertex_count() + 0.5));
  for (std::uint32_t n = 0; n < horizon(); ++n) {
    const auto level = t.level_set(n);  // copy: add_child grows the level table
    for (VertexId v : level) {
      for (std::uint32_t c = 0; c < degree_[n]; ++c) t.add_child(v);
    }
  }
  return t;
}

Tree spherically_symmetric(const DegreeSequence& d, std::uint32_t n, std::size_t vertex_cap) {
  return SphericalTree(d, n).materialize(vertex_cap);
}

// ---- ThreeOneTree ------------------------------------------------------

std::uint32_t ThreeOneTree::base_level(std::uint32_t d) {
  if (d == 0) return 0;
  std::uint32_t n = static_cast<std::uint32_t>((std::sqrt(8.0 * d + 1.0) - 1.0) / 2.0);
  while (base_depth(n) < d) ++n;
  while (n > 0 && base_depth(n - 1) >= d) --n;
  return n;
}

double ThreeOneTree::log_level_count(std::uint32_t d) const {
  return static_cast<double>(base_level(d)) * std::log(2.0);
}

double ThreeOneTree::vertex_count() const {
  double total = 0.0;
  for (std::uint32_t d = 0; d <= horizon_; ++d) total += std::exp(log_level_count(d));
  return total;
}

Tree ThreeOneTree::materialize(std::size_t vertex_cap) const {
  check_cap(vertex_count(), vertex_cap);
  Tree t;
  t.reserve(static_cast<std::size_t>(vertex_count() + 0.5));
  std::vector<VertexId> base{t.root()};  // base vertices of the current level, left to right
  for (std::uint32_t n = 0; base_depth(n) < horizon_; ++n) {
    const std::uint64_t half = n == 0 ? 0 : (std::uint64_t{1} << (n - 1));
    const std::uint32_t len = n + 1;  // path length of the next level's edges
    std::vector<VertexId> next;
    next.reserve(base.size() * 2);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::uint32_t kids = n == 0 ? 2 : (i < half ? 1 : 3);
      for (std::uint32_t c = 0; c < kids; ++c) {
        VertexId v = base[i];
        for (std::uint32_t s = 0; s < len && t.depth(v) < horizon_; ++s) v = t.add_child(v);
        next.push_back(v);
      }
    }
    base.swap(next);
  }
  return t;
}

Tree three_one_stretched(std::uint32_t n, std::size_t vertex_cap) {
  if (n < 1) throw std::invalid_argument("depth must be >= 1");
  return ThreeOneTree(n).materialize(vertex_cap);
}

Tree from_branch_marks(const std::vector<bool>& marks, std::uint32_t n, std::size_t vertex_cap) {
  return spherically_symmetric(marks_degrees(marks), n, vertex_cap);
}

Tree path_tree(std::uint32_t n) {
  Tree t;
  VertexId v = t.root();
  for (std::uint32_t i = 0; i < n; ++i) v = t.add_child(v);
  return t;
}

// ---- sources -----------------------------------------------------------

std::uint32_t source_horizon(const TreeSource& s) {
  struct V {
    std::uint32_t operator()(const SphericalTree& t) const { return t.horizon(); }
    std::uint32_t operator()(const ThreeOneTree& t) const { return t.horizon(); }
    std::uint32_t operator()(const std::shared_ptr<const Tree>& t) const { return t->height(); }
  };
  return std::visit(V{}, s);
}

double source_log_level_count(const TreeSource& s, std::uint32_t n) {
  struct V {
    std::uint32_t n;
    double operator()(const SphericalTree& t) const {
      return n <= t.horizon() ? t.log_level_count(n) : -std::numeric_limits<double>::infinity();
    }
    double operator()(const ThreeOneTree& t) const {
      return n <= t.horizon() ? t.log_level_count(n) : -std::numeric_limits<double>::infinity();
    }
    double operator()(const std::shared_ptr<const Tree>& t) const {
      const auto c = t->level_size(n);
      return c == 0 ? -std::numeric_limits<double>::infinity() : std::log(static_cast<double>(c));
    }
  };
  return std::visit(V{n}, s);
}

TreeSource make_family(const std::string& family, std::uint32_t horizon) {
  if (family == "seq") return SphericalTree(sequence_degrees(), horizon);
  if (family == "binary") return SphericalTree(constant_degrees(2), horizon);
  if (family == "path") return SphericalTree(constant_degrees(1), horizon);
  if (family == "three-one") return ThreeOneTree(horizon);
  throw std::invalid_argument("unknown tree family: " + family);
}

}  // namespace ibn
