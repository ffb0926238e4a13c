#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "disttack/exp/config.hpp"

namespace disttack {

// What the multipliers scale: SBM block sizes (p fixed) or the feature dimension.
enum class BenchAxis { size, features };

BenchAxis parse_bench_axis(std::string_view name);
std::string_view to_string(BenchAxis a);

struct BenchOptions {
  BenchAxis axis = BenchAxis::size;
  int repeats = 3;
};

struct BenchRow {
  double multiplier = 1.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double avg_degree = 0.0;
  std::size_t feature_dim = 0;
  double sub_nodes = 0.0;  // mean over attack iterations
  double sub_edges = 0.0;
  // sub_nodes * (sub_edges * avg_degree + feature_dim)
  double complexity = 0.0;
  // Median per-iteration time of the perturbation phase (surrogate excluded).
  double seconds = 0.0;
  double surrogate_seconds = 0.0;
};

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

struct BenchResult {
  std::vector<BenchRow> rows;
  LinearFit fit;  // seconds against complexity
};

nlohmann::json to_json(const BenchResult& b);

/// Times Disttack iterations on SBM graphs derived from `base` by each
/// multiplier. Needs at least 3 multipliers and an SBM dataset.
BenchResult scaling_benchmark(const ExperimentConfig& base, std::span<const double> multipliers,
                              const BenchOptions& opts = {});

}  // namespace disttack
