#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "disttack/graph/graph.hpp"

namespace disttack {

struct EdgeChange {
  NodeId i = 0;
  NodeId j = 0;
  double score = 0.0;
  int iter = 0;

  friend bool operator==(const EdgeChange&, const EdgeChange&) = default;
};

struct FeatureFlip {
  NodeId node = 0;
  std::size_t dim = 0;
  double old_value = 0.0;
  double new_value = 0.0;
  // Sign of the attack-loss gradient that drove the flip (0 for random baselines).
  int sign = 0;
  int iter = 0;

  friend bool operator==(const FeatureFlip&, const FeatureFlip&) = default;
};

/// Ordered audit trail of an attack. Replaying it on the graph it was
/// computed from reproduces the perturbed graph exactly.
struct PerturbationSet {
  std::vector<EdgeChange> edges_removed;
  std::vector<EdgeChange> edges_added;  // RA / DICE only
  std::vector<FeatureFlip> features_flipped;
  // lambda_homo * |change in homophily distance| for every applied perturbation, in order.
  std::vector<double> homophily_penalties;
  nlohmann::json config = nlohmann::json::object();

  bool empty() const noexcept {
    return edges_removed.empty() && edges_added.empty() && features_flipped.empty();
  }
  std::size_t size() const noexcept { return edges_removed.size() + edges_added.size() + features_flipped.size(); }
};

// Removals, then additions, then feature writes. Throws InvalidArgument if
// a removal targets a missing edge or an addition an existing one.
Graph apply_perturbations(const Graph& g, const PerturbationSet& p);

nlohmann::json to_json(const PerturbationSet& p);
PerturbationSet perturbation_from_json(const nlohmann::json& j);

void write_perturbation_json(const PerturbationSet& p, const std::filesystem::path& path);
PerturbationSet read_perturbation_json(const std::filesystem::path& path);

}  // namespace disttack
