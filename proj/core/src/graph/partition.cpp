#include "disttack/graph/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "disttack/rng.hpp"

namespace disttack {

PartitionStrategy parse_partition_strategy(std::string_view name) {
  if (name == "round_robin") return PartitionStrategy::round_robin;
  if (name == "hash") return PartitionStrategy::hash;
  if (name == "random") return PartitionStrategy::random;
  throw InvalidArgument("unknown partition strategy '" + std::string(name) + "'");
}

std::string_view to_string(PartitionStrategy s) {
  switch (s) {
    case PartitionStrategy::round_robin: return "round_robin";
    case PartitionStrategy::hash: return "hash";
    case PartitionStrategy::random: return "random";
  }
  return "unknown";
}

std::vector<NodeId> Partition::members(int worker) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == worker) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::vector<NodeId> Partition::train_share(const Graph& g, int worker) const {
  std::vector<NodeId> out;
  for (NodeId i : g.train_nodes()) {
    if (worker_of(i) == worker) out.push_back(i);
  }
  return out;
}

Partition partition_nodes(const Graph& g, int n, PartitionStrategy strategy, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("worker count must be >= 1, got " + std::to_string(n));
  Partition p;
  p.num_workers = n;
  p.assignment.resize(g.num_nodes());
  const auto un = static_cast<std::uint64_t>(n);
  switch (strategy) {
    case PartitionStrategy::round_robin:
      for (std::size_t i = 0; i < g.num_nodes(); ++i) p.assignment[i] = static_cast<int>(i % un);
      break;
    case PartitionStrategy::hash:
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        p.assignment[i] = static_cast<int>(splitmix64(i) % un);
      }
      break;
    case PartitionStrategy::random: {
      // Balanced: shuffle node ids and deal them out round-robin.
      std::vector<std::size_t> order(g.num_nodes());
      std::iota(order.begin(), order.end(), 0);
      Rng rng(derive_seed(seed, stream::partition));
      for (std::size_t k = order.size(); k > 1; --k) {
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        std::swap(order[k - 1], order[pick(rng)]);
      }
      for (std::size_t k = 0; k < order.size(); ++k) p.assignment[order[k]] = static_cast<int>(k % un);
      break;
    }
  }
  return p;
}

std::size_t count_cross_edges(const Graph& g, const Partition& p) {
  std::size_t count = 0;
  for (const Edge& e : g.edge_list()) {
    if (p.is_cross(e.u, e.v)) ++count;
  }
  return count;
}

}  // namespace disttack
