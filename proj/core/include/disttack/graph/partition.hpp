#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "disttack/graph/graph.hpp"

namespace disttack {

enum class PartitionStrategy { round_robin, hash, random };

PartitionStrategy parse_partition_strategy(std::string_view name);
std::string_view to_string(PartitionStrategy s);

// Node -> computing-node assignment.
struct Partition {
  std::vector<int> assignment;
  int num_workers = 0;

  int worker_of(NodeId i) const { return assignment.at(i); }
  std::vector<NodeId> members(int worker) const;
  // Training nodes owned by `worker`: its sampling pool.
  std::vector<NodeId> train_share(const Graph& g, int worker) const;
  bool is_cross(NodeId i, NodeId j) const { return worker_of(i) != worker_of(j); }
};

// Throws InvalidArgument when n < 1. `seed` is only read by the random strategy.
Partition partition_nodes(const Graph& g, int n, PartitionStrategy strategy = PartitionStrategy::round_robin,
                          std::uint64_t seed = 0);

std::size_t count_cross_edges(const Graph& g, const Partition& p);

}  // namespace disttack
