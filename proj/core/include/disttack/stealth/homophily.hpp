#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "disttack/graph/graph.hpp"

namespace disttack {

// How neighbor features are weighted in the aggregate a_i.
enum class HomophilyWeighting {
  degree_ratio,  // sqrt(d_j) / sqrt(d_i)
  symmetric,     // 1 / sqrt(d_i d_j), the usual GCN normalization
};

enum class DistanceMeasure { wasserstein1, ks };

DistanceMeasure parse_distance_measure(std::string_view name);
std::string_view to_string(DistanceMeasure m);
HomophilyWeighting parse_homophily_weighting(std::string_view name);
std::string_view to_string(HomophilyWeighting w);

/// h_i = || (a_i, X_i) ||_2 with a_i = sum_{j in N(i)} w_ij X_j.
///
/// Degrees come from the raw adjacency (no self-loop). An isolated node has
/// a_i = 0, so h_i = ||X_i||.
double node_homophily(const Graph& g, NodeId i, HomophilyWeighting weighting = HomophilyWeighting::degree_ratio);

struct HomophilyDistribution {
  std::vector<double> values;  // one per node, indexed by node id
};

HomophilyDistribution homophily_distribution(const Graph& g,
                                             HomophilyWeighting weighting = HomophilyWeighting::degree_ratio);

double distribution_distance(std::span<const double> p, std::span<const double> q,
                             DistanceMeasure measure = DistanceMeasure::wasserstein1);
double distribution_distance(const HomophilyDistribution& p, const HomophilyDistribution& q,
                             DistanceMeasure measure = DistanceMeasure::wasserstein1);

// Both inputs must already be sorted ascending.
double sorted_distance(std::span<const double> p, std::span<const double> q, DistanceMeasure measure);

// lambda * M(H(g), H(g_perturbed)).
double stealth_penalty(const Graph& g, const Graph& g_perturbed, double lambda_homo,
                       DistanceMeasure measure = DistanceMeasure::wasserstein1,
                       HomophilyWeighting weighting = HomophilyWeighting::degree_ratio);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count_clean = 0;
  std::size_t count_perturbed = 0;
};

// Equal-width bins over the pooled [min, max] of both samples.
std::vector<HistogramBin> paired_histogram(const HomophilyDistribution& clean, const HomophilyDistribution& perturbed,
                                           std::size_t bins = 32);

// CSV `bin_lo,bin_hi,count_clean,count_perturbed`.
void write_histogram_csv(std::span<const HistogramBin> bins, const std::filesystem::path& path);

using HomophilyChange = std::pair<NodeId, double>;

// Nodes whose h changes when edge (u, v) is added or removed: u, v and their neighbors.
std::vector<NodeId> nodes_affected_by_edge(const Graph& g, NodeId u, NodeId v);
// Nodes whose h changes when X_i changes: i and its neighbors.
std::vector<NodeId> nodes_affected_by_feature(const Graph& g, NodeId i);

/// Running homophily distribution of a graph under perturbation, measured
/// against a fixed clean reference. Lets a greedy search price a single
/// candidate without recomputing every node.
class HomophilyTracker {
 public:
  HomophilyTracker(const Graph& clean, HomophilyWeighting weighting, DistanceMeasure measure);

  double current_distance() const noexcept { return current_distance_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Distance to the reference if `changes` (node, new h) were applied.
  double distance_with(std::span<const HomophilyChange> changes) const;
  void commit(std::span<const HomophilyChange> changes);

  // New h for `nodes` evaluated on `g`.
  std::vector<HomophilyChange> evaluate(const Graph& g, std::span<const NodeId> nodes) const;

  HomophilyWeighting weighting() const noexcept { return weighting_; }

 private:
  std::vector<double> replaced_sorted(std::span<const HomophilyChange> changes) const;

  HomophilyWeighting weighting_;
  DistanceMeasure measure_;
  std::vector<double> reference_sorted_;
  std::vector<double> values_;
  std::vector<double> sorted_;
  double current_distance_ = 0.0;
};

}  // namespace disttack
