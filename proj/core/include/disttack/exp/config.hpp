#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disttack/attack/attack.hpp"
#include "disttack/dist/trainer.hpp"
#include "disttack/gnn/params.hpp"
#include "disttack/graph/partition.hpp"
#include "disttack/graph/sbm.hpp"

namespace disttack {

enum class AttackMethod { none, disttack, random, dice };

AttackMethod parse_attack_method(std::string_view name);
std::string_view to_string(AttackMethod m);

struct DatasetSpec {
  enum class Kind { sbm, files };
  Kind kind = Kind::sbm;
  SbmParams sbm{.block_sizes = {50, 50, 50, 50}};
  std::filesystem::path edges;
  std::filesystem::path nodes;
  std::filesystem::path splits;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ModelSpec model;
  double learning_rate = 0.2;

  int workers = 4;
  PartitionStrategy partition = PartitionStrategy::round_robin;
  TrainConfig training;  // seed is replaced by each run's seed

  AttackMethod attack = AttackMethod::none;
  AttackConfig attack_cfg;  // seed is replaced by each run's seed
  // When set, edge budget = round(fraction * |E|) of each run's graph.
  std::optional<double> edge_budget_fraction;

  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "results";
  int parallel_seeds = 1;
};

/// Parses a JSON document:
///
///   { "dataset":  {"type": "sbm", "block_sizes": [...], "p_intra", "p_inter", ...}
///                 | {"type": "files", "edges", "nodes", "splits"},
///     "model":    {"kind", "hidden", "sgc_steps", "learning_rate"},
///     "training": {"workers", "partition", "epochs", "batch_size", "aggregation",
///                  "threads", "poison_start_epoch", "record_wall_time"},
///     "attack":   {"method", "edge_budget_fraction", <attack parameters>},
///     "seeds": [...], "output_dir": "...", "parallel_seeds": k }
///
/// Missing keys keep defaults; unknown keys and invalid values raise
/// ConfigError naming the dotted field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        std::span<const std::string> overrides = {});

// Applies `a.b.c=value` to j. The value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, std::string_view assignment);

}  // namespace disttack
