#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "disttack/exp/config.hpp"
#include "disttack/exp/runner.hpp"

namespace disttack {

std::string code_version();

struct Summary {
  std::string code_version;
  nlohmann::json config;
  std::vector<RunResult> runs;
};

nlohmann::json summary_json(const ExperimentConfig& cfg, std::span<const RunResult> results);
Summary summary_from_json(const nlohmann::json& j);
Summary load_summary(const std::filesystem::path& path);

/// Writes into out_dir:
///   summary.json
///   seed<S>/gradients_clean.csv, seed<S>/gradients_attacked.csv, seed<S>/divergence.csv,
///   seed<S>/homophily_hist.csv, seed<S>/perturbation.json
/// Refuses a non-empty out_dir unless `force`.
void emit_results(const ExperimentConfig& cfg, std::span<const RunResult> results, const std::filesystem::path& out_dir,
                  bool force = false);

}  // namespace disttack
