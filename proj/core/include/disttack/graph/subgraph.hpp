#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "disttack/graph/graph.hpp"

namespace disttack {

/// Targets plus their current 1-hop neighbors, with the induced adjacency.
///
/// `global_ids[k]` is the parent id of local node k. The first
/// `num_targets` local ids are the targets in the order given; neighbors
/// follow in ascending parent id.
struct Subgraph {
  std::vector<NodeId> global_ids;
  std::size_t num_targets = 0;
  std::unordered_map<NodeId, NodeId> local_of;
  Graph local;

  std::size_t size() const noexcept { return global_ids.size(); }
  NodeId to_global(NodeId local_id) const { return global_ids.at(local_id); }
  NodeId to_local(NodeId global_id) const;
  bool contains(NodeId global_id) const { return local_of.contains(global_id); }
};

Subgraph sample_1hop(const Graph& g, NodeId target);
// Union of the 1-hop neighborhoods of several targets (deduplicated).
Subgraph sample_1hop(const Graph& g, std::span<const NodeId> targets);

}  // namespace disttack
