#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disttack/attack/perturbation.hpp"
#include "disttack/gnn/params.hpp"
#include "disttack/graph/partition.hpp"
#include "disttack/graph/subgraph.hpp"
#include "disttack/stealth/homophily.hpp"

namespace disttack {

enum class TargetRule { highest_degree, random };

TargetRule parse_target_rule(std::string_view name);
std::string_view to_string(TargetRule r);

struct AttackConfig {
  double w_a = 1.0;          // structure-gradient weight
  double w_x = 1.0;          // feature-gradient weight
  double lambda_comm = 0.1;  // bonus for cross-worker edges, penalty for local ones
  double lambda_homo = 1.0;  // homophily-distance penalty
  std::size_t edge_budget = 0;
  std::size_t feature_budget = 0;
  int iterations = 5;
  int surrogate_epochs = 100;
  std::size_t surrogate_hidden = 16;
  double surrogate_lr = 0.5;
  // Continue from the previous iteration's surrogate instead of re-initializing.
  bool warm_start = false;
  // true: x <- x * (1 - 2 sgn(g)), so a negative gradient triples x.
  // false: every selected entry is negated.
  bool strict_eq10 = true;
  std::size_t num_targets = 8;
  TargetRule target_rule = TargetRule::highest_degree;
  int poisoned_worker = 0;
  DistanceMeasure measure = DistanceMeasure::wasserstein1;
  HomophilyWeighting weighting = HomophilyWeighting::degree_ratio;
  std::uint64_t seed = 0;
};

void validate(const AttackConfig& cfg);
nlohmann::json to_json(const AttackConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
AttackConfig attack_config_from_json(const nlohmann::json& j, AttackConfig base = {});

// Full-batch 2-layer GCN on g's training nodes. `warm` replaces the seeded initialization.
ParamSet train_surrogate(const Graph& g, int epochs, std::uint64_t seed, std::size_t hidden = 16,
                         double learning_rate = 0.5, const ParamSet* warm = nullptr);
ParamSet train_surrogate(const Graph& g, const AttackConfig& cfg, const ParamSet* warm = nullptr);

// Targets on cfg.poisoned_worker's training share according to cfg.target_rule.
std::vector<NodeId> select_targets(const Graph& g, const Partition& part, const AttackConfig& cfg);

struct SubgraphGradient {
  CsrMatrix edge_grad;   // w_A * dL_atk/dA over the subgraph's edges (local ids)
  Matrix feature_grad;   // w_X * dL_atk/dX (local rows)
  double attack_loss = 0.0;
};

// Gradients of the attack loss over the subgraph's targets, computed on the
// subgraph alone.
SubgraphGradient combined_subgraph_gradient(const ParamSet& theta, const Subgraph& sub, const AttackConfig& cfg);

// +1 on edges whose endpoints live on different workers, -1 otherwise (local ids).
CsrMatrix communication_matrix(const Subgraph& sub, const Partition& part);

// Per-edge removal scores on the subgraph.
struct ScoreMatrix {
  CsrMatrix scores;               // local ids, pattern = subgraph edges
  std::vector<NodeId> global_ids; // local -> parent id
};

// S = A ⊙ (G + lambda_comm * C).
ScoreMatrix edge_scores(const CsrMatrix& edge_grad, const Subgraph& sub, const Partition& part, double lambda_comm);

struct ScoredEdge {
  NodeId i = 0;  // parent ids, i < j
  NodeId j = 0;
  double score = 0.0;
};

// Top-k edges with score > 0, by descending score; ties go to the smaller
// (min endpoint, max endpoint) pair.
std::vector<ScoredEdge> select_edge_removals(const ScoreMatrix& scores, std::size_t k);

struct FlipRecord {
  std::size_t dim = 0;
  double old_value = 0.0;
  double new_value = 0.0;
  int sign = 0;
};

struct FlipResult {
  std::vector<double> row;
  std::vector<FlipRecord> flips;
};

// Flips the m entries with the largest |gradient| (zero-gradient entries are
// never selected). strict: x * (1 - 2 sgn(g)); otherwise -x.
FlipResult flip_features(std::span<const double> x_row, std::span<const double> grad_row, std::size_t m,
                         bool strict_eq10 = true);

struct AttackIterationTrace {
  int iter = 0;
  double surrogate_seconds = 0.0;
  // Sampling, gradients, scoring, selection and application.
  double perturb_seconds = 0.0;
  std::size_t subgraph_nodes = 0;
  std::size_t subgraph_edges = 0;
  std::size_t edges_removed = 0;
  std::size_t features_flipped = 0;
  double surrogate_attack_loss = 0.0;
};

struct AttackTrace {
  std::vector<AttackIterationTrace> iterations;
  double total_seconds = 0.0;
};

/// Iterative poisoning of one worker's share: refresh the surrogate, take
/// weighted attack gradients on the targets' 1-hop subgraph, remove the
/// best-scoring edges, flip the most sensitive features, repeat. When
/// lambda_homo > 0 each candidate's score is reduced by lambda_homo times
/// the change in homophily distance it would cause, evaluated greedily
/// against the running perturbed graph.
PerturbationSet run_disttack(const Graph& g, const Partition& part, const AttackConfig& cfg,
                             std::span<const NodeId> targets, AttackTrace* trace = nullptr);

// RA: random removals / additions touching the poisoned share and random feature sign flips.
PerturbationSet baseline_random(const Graph& g, const Partition& part, std::size_t edge_budget,
                                std::size_t feature_budget, std::uint64_t seed, int worker = 0);

// DICE: each budget unit removes a same-label edge or adds a different-label
// non-edge (coin flip), touching the poisoned share. Units with no eligible
// candidate are skipped.
PerturbationSet baseline_dice(const Graph& g, const Partition& part, std::size_t edge_budget, std::uint64_t seed,
                              int worker = 0);

}  // namespace disttack
