#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "disttack/gnn/params.hpp"
#include "disttack/graph/graph.hpp"

namespace disttack {

enum class CheckedLoss { mean_ce, attack };

struct GradCheckGroup {
  std::string name;  // "W0", "W1", "W", "X", "A"
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose ±epsilon probes straddle a ReLU kink (finite
  // differences are meaningless there).
  std::size_t skipped = 0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double epsilon = 0.0;

  double max_rel_error() const;
  const GradCheckGroup& group(const std::string& name) const;
};

/// Central finite-difference check of backward() against a dense
/// re-implementation of the forward pass.
///
/// Every coordinate of each weight, every feature entry and every live edge
/// weight is probed. For edges the probe moves A_ij and A_ji together and
/// renormalizes, so degree changes are included. Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6). Intended for
/// graphs of at most 64 nodes.
GradCheckReport check_gradients(const ParamSet& params, const Graph& g, std::span<const NodeId> nodes,
                                double epsilon = 1e-4, CheckedLoss loss = CheckedLoss::mean_ce);

struct GradCheckOptions {
  std::uint64_t seed = 0;
  std::size_t nodes = 12;
  std::size_t hidden = 8;
  std::size_t feature_dim = 6;
  double epsilon = 1e-4;
  CheckedLoss loss = CheckedLoss::mean_ce;
};

// Small seeded 3-block SBM with a freshly initialized GCN; the loss covers
// every node (mean_ce) or the first three (attack).
GradCheckReport run_gradcheck(const GradCheckOptions& opts);

}  // namespace disttack
