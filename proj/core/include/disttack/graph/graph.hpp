#pragma once

#include <optional>
#include <span>
#include <vector>

#include "disttack/graph/sparse.hpp"
#include "disttack/types.hpp"

namespace disttack {

enum class Split : std::uint8_t { none, train, val, test };

struct SplitLists {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

/// Undirected, unweighted graph with dense node features and class labels.
///
/// Adjacency lives in a CSR layout with sorted neighbor lists. Removing an
/// edge only tombstones its two CSR slots, so a removal is O(log d) and can
/// be undone with restore_edge(); compact() drops tombstoned slots. Edge
/// additions rebuild the CSR arrays.
class Graph {
 public:
  Graph() = default;

  /// Symmetrizes, deduplicates and strips self-loops from `edges`.
  /// Throws InvalidArgument on out-of-range ids, a node listed in two
  /// splits, zero nodes, or a feature/label row count different from
  /// `num_nodes`.
  static Graph build(std::size_t num_nodes, std::span<const Edge> edges, Matrix features,
                     std::vector<int> labels, const SplitLists& splits);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  /// Live undirected edges.
  std::size_t num_edges() const noexcept { return num_edges_; }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  /// Self-loops dropped by build().
  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }

  std::size_t degree(NodeId i) const { return degree_.at(i); }
  double average_degree() const noexcept;

  bool has_edge(NodeId i, NodeId j) const;
  std::vector<NodeId> neighbors(NodeId i) const;

  template <typename F>
  void for_each_neighbor(NodeId i, F&& f) const {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (alive_[k]) f(col_[k]);
    }
  }

  /// Tombstones edge (i, j) in both directions. Returns false if it is not live.
  bool remove_edge(NodeId i, NodeId j);
  /// Revives a tombstoned edge. Returns false if the slot does not exist or is live.
  bool restore_edge(NodeId i, NodeId j);
  /// Adds undirected edges (ignores existing ones and self-loops), rebuilding CSR.
  void add_edges(std::span<const Edge> edges);
  /// Drops tombstoned slots from the CSR arrays.
  void compact();
  std::size_t tombstones() const noexcept { return col_.size() - 2 * num_edges_; }

  /// Live edges as (u < v) pairs in row-major order.
  std::vector<Edge> edge_list() const;

  /// Live adjacency as a CSR matrix of ones.
  CsrMatrix adjacency() const;

  const Matrix& features() const noexcept { return features_; }
  Matrix& mutable_features() noexcept { return features_; }
  std::span<const double> feature_row(NodeId i) const;

  const std::vector<int>& labels() const noexcept { return labels_; }
  int label(NodeId i) const { return labels_.at(i); }

  Split split_of(NodeId i) const { return split_.at(i); }
  const std::vector<NodeId>& train_nodes() const noexcept { return train_; }
  const std::vector<NodeId>& val_nodes() const noexcept { return val_; }
  const std::vector<NodeId>& test_nodes() const noexcept { return test_; }

  void check_node(NodeId i) const;

  /// Structural + feature equality (tombstones are ignored).
  bool same_as(const Graph& other) const;

 private:
  void rebuild(std::vector<Edge> canonical_edges);

  std::size_t num_nodes_ = 0;
  std::size_t num_edges_ = 0;
  std::size_t num_classes_ = 0;
  std::size_t dropped_self_loops_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<NodeId> col_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::size_t> degree_;
  Matrix features_;
  std::vector<int> labels_;
  std::vector<Split> split_;
  std::vector<NodeId> train_, val_, test_;
};

/// D̃^{-1/2} (A + I) D̃^{-1/2} together with the degrees of A + I.
struct NormalizedAdjacency {
  CsrMatrix matrix;
  std::vector<double> degree;
};

NormalizedAdjacency normalize_adjacency(const Graph& g);

}  // namespace disttack
