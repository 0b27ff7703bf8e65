#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ibn {

using VertexId = std::uint32_t;

// Nonnegative edge weights stored as natural logs (-inf encodes 0).
// Edges are addressed by their child endpoint.
class EdgeWeightProfile {
 public:
  using DepthRule = std::function<double(std::uint32_t)>;

  static EdgeWeightProfile from_depth_rule(DepthRule log_rule, std::string name);
  static EdgeWeightProfile from_edges(std::vector<double> log_weights,
                                      std::string name);

  // w(e) = exp(-|e|^lambda)
  static EdgeWeightProfile ibn(double lambda);
  // p(e) = exp(-|e|^(lambda-1))
  static EdgeWeightProfile percolation(double lambda);
  // w(e) = 1
  static EdgeWeightProfile unit();

  bool depth_only() const { return static_cast<bool>(rule_); }
  const std::string& name() const { return name_; }

  double log_weight(VertexId v, std::uint32_t depth) const;
  double weight(VertexId v, std::uint32_t depth) const;
  double log_weight_at_depth(std::uint32_t depth) const;
  // Table of log weights for depths 0..n (entry 0 unused).
  std::vector<double> depth_table(std::uint32_t n) const;

  // Profile whose weights are raised to the power gamma.
  EdgeWeightProfile pow(double gamma) const;

  const std::vector<double>& edge_values() const { return per_edge_; }

 private:
  DepthRule rule_;
  std::vector<double> per_edge_;
  std::string name_;
};

}  // namespace ibn
