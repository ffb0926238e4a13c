#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "disttack/attack/attack.hpp"
#include "disttack/dist/trainer.hpp"
#include "disttack/exp/config.hpp"
#include "disttack/stealth/homophily.hpp"

namespace disttack {

/// One seed of an experiment: paired clean and attacked training that share
/// graph, partition, initialization and sampling seed.
struct RunResult {
  std::uint64_t seed = 0;
  double clean_accuracy = 0.0;
  double attacked_accuracy = 0.0;
  double accuracy_drop = 0.0;  // clean - attacked
  double target_clean_accuracy = 0.0;
  double target_attacked_accuracy = 0.0;
  // Poisoned worker's norm minus the mean of the rest, attacked and clean runs.
  std::vector<double> divergence;
  std::vector<double> control_divergence;
  // Share of post-poisoning epochs in which the poisoned worker's norm is above the others' mean.
  double poisoned_above_fraction = 0.0;
  double homophily_distance = 0.0;
  double attack_seconds = 0.0;
  double wall_seconds = 0.0;
  std::size_t edges_removed = 0;
  std::size_t edges_added = 0;
  std::size_t features_flipped = 0;
  std::size_t edge_budget = 0;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::vector<NodeId> targets;

  // Artifacts for emit_results; not part of the summary.
  PerturbationSet perturbations;
  std::vector<SyncRecord> clean_records;
  std::vector<SyncRecord> attacked_records;
  std::vector<HistogramBin> homophily_histogram;
};

nlohmann::json to_json(const RunResult& r);
// Restores the summary fields only.
RunResult run_result_from_json(const nlohmann::json& j);

// Graph for one seed (SBM generated with that seed, or loaded from files).
Graph build_graph(const ExperimentConfig& cfg, std::uint64_t seed);

// Runs a single seed; `poison` overrides the attack step when provided (replay).
RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const PerturbationSet* poison = nullptr);

// All seeds in order; cfg.parallel_seeds > 1 runs them on that many threads.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

// Fraction of epochs (from `start` on) with divergence > 0.
double positive_fraction(const std::vector<double>& divergence, int start = 0);

}  // namespace disttack
