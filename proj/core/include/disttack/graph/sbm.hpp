#pragma once

#include <cstdint>
#include <vector>

#include "disttack/graph/graph.hpp"

namespace disttack {

struct SbmParams {
  std::vector<std::size_t> block_sizes;
  double p_intra = 0.1;
  double p_inter = 0.01;
  std::size_t feature_dim = 16;
  // Standard deviation of the Gaussian noise added to the one-hot label features.
  double noise = 1.0;
  double train_fraction = 0.5;
  double val_fraction = 0.2;
};

// Labels are block ids; features are one-hot(label) + N(0, noise^2), so
// feature_dim must be at least the number of blocks. Splits are a seeded
// random permutation cut by the given fractions; the rest is test.
Graph generate_sbm(std::uint64_t seed, const SbmParams& params);

}  // namespace disttack
