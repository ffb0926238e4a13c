#include "disttack/graph/subgraph.hpp"

#include <algorithm>
#include <string>

namespace disttack {

NodeId Subgraph::to_local(NodeId global_id) const {
  const auto it = local_of.find(global_id);
  if (it == local_of.end()) throw InvalidArgument("node " + std::to_string(global_id) + " not in subgraph");
  return it->second;
}

Subgraph sample_1hop(const Graph& g, NodeId target) {
  const NodeId targets[] = {target};
  return sample_1hop(g, targets);
}

Subgraph sample_1hop(const Graph& g, std::span<const NodeId> targets) {
  if (targets.empty()) throw InvalidArgument("sample_1hop: no targets");
  Subgraph sub;
  for (NodeId t : targets) {
    g.check_node(t);
    if (sub.local_of.emplace(t, static_cast<NodeId>(sub.global_ids.size())).second) sub.global_ids.push_back(t);
  }
  sub.num_targets = sub.global_ids.size();

  std::vector<NodeId> rest;
  for (NodeId t : targets) {
    g.for_each_neighbor(t, [&](NodeId j) {
      if (!sub.local_of.contains(j)) rest.push_back(j);
    });
  }
  std::sort(rest.begin(), rest.end());
  rest.erase(std::unique(rest.begin(), rest.end()), rest.end());
  for (NodeId j : rest) {
    sub.local_of.emplace(j, static_cast<NodeId>(sub.global_ids.size()));
    sub.global_ids.push_back(j);
  }

  const std::size_t n = sub.global_ids.size();
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a) {
    g.for_each_neighbor(sub.global_ids[a], [&](NodeId gj) {
      const auto it = sub.local_of.find(gj);
      if (it != sub.local_of.end() && a < it->second) edges.push_back({a, it->second});
    });
  }

  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g.feature_dim()));
  std::vector<int> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    features.row(static_cast<Eigen::Index>(a)) = g.features().row(sub.global_ids[a]);
    labels[a] = g.label(sub.global_ids[a]);
  }
  sub.local = Graph::build(n, edges, std::move(features), std::move(labels), {});
  return sub;
}

}  // namespace disttack
