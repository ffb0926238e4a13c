#include "disttack/graph/sbm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "disttack/rng.hpp"

namespace disttack {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string("SBM ") + name + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

Graph generate_sbm(std::uint64_t seed, const SbmParams& params) {
  if (params.block_sizes.empty()) throw InvalidArgument("SBM needs at least one block");
  check_probability(params.p_intra, "p_intra");
  check_probability(params.p_inter, "p_inter");
  check_probability(params.train_fraction, "train_fraction");
  check_probability(params.val_fraction, "val_fraction");
  if (params.train_fraction + params.val_fraction > 1.0) {
    throw InvalidArgument("SBM train_fraction + val_fraction must not exceed 1");
  }
  if (params.feature_dim < params.block_sizes.size()) {
    throw InvalidArgument("SBM feature_dim must be >= number of blocks for one-hot labels");
  }
  if (!(params.noise >= 0.0)) throw InvalidArgument("SBM noise must be non-negative");

  const std::size_t n = std::accumulate(params.block_sizes.begin(), params.block_sizes.end(), std::size_t{0});
  if (n == 0) throw InvalidArgument("SBM has zero nodes");

  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t b = 0; b < params.block_sizes.size(); ++b) {
    labels.insert(labels.end(), params.block_sizes[b], static_cast<int>(b));
  }

  Rng edge_rng(derive_seed(seed, stream::sbm_edges));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? params.p_intra : params.p_inter;
      // Always draw so the stream position does not depend on p.
      if (coin(edge_rng) < p) edges.push_back({i, j});
    }
  }

  Rng feat_rng(derive_seed(seed, stream::sbm_features));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(params.feature_dim));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index d = 0; d < features.cols(); ++d) features(i, d) = params.noise * gauss(feat_rng);
    features(i, labels[static_cast<std::size_t>(i)]) += 1.0;
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(seed, stream::sbm_splits));
  for (std::size_t k = n; k > 1; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::swap(order[k - 1], order[pick(split_rng)]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(params.train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(params.val_fraction * static_cast<double>(n)));
  SplitLists splits;
  splits.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  splits.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                    order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  splits.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());

  return Graph::build(n, edges, std::move(features), std::move(labels), splits);
}

}  // namespace disttack
