#include "disttack/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace disttack {

namespace {

void assign_split(std::vector<Split>& split, const std::vector<NodeId>& ids, Split which,
                  std::size_t n) {
  for (NodeId i : ids) {
    if (i >= n) throw InvalidArgument("split references node " + std::to_string(i) + " >= " + std::to_string(n));
    if (split[i] != Split::none) {
      throw InvalidArgument("node " + std::to_string(i) + " appears in more than one split");
    }
    split[i] = which;
  }
}

}  // namespace

Graph Graph::build(std::size_t num_nodes, std::span<const Edge> edges, Matrix features,
                   std::vector<int> labels, const SplitLists& splits) {
  if (num_nodes == 0) throw InvalidArgument("graph must have at least one node");
  if (static_cast<std::size_t>(features.rows()) != num_nodes) {
    throw InvalidArgument("feature rows (" + std::to_string(features.rows()) + ") != num_nodes (" +
                          std::to_string(num_nodes) + ")");
  }
  if (labels.size() != num_nodes) throw InvalidArgument("label count != num_nodes");
  if (!features.allFinite()) throw InvalidArgument("features must be finite");

  Graph g;
  g.num_nodes_ = num_nodes;
  int max_label = -1;
  for (int y : labels) {
    if (y < 0) throw InvalidArgument("labels must be non-negative");
    max_label = std::max(max_label, y);
  }
  g.num_classes_ = static_cast<std::size_t>(max_label + 1);
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);

  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (e.u == e.v) {
      ++g.dropped_self_loops_;
      continue;
    }
    canon.push_back(canonical(e));
  }
  g.rebuild(std::move(canon));

  g.split_.assign(num_nodes, Split::none);
  assign_split(g.split_, splits.train, Split::train, num_nodes);
  assign_split(g.split_, splits.val, Split::val, num_nodes);
  assign_split(g.split_, splits.test, Split::test, num_nodes);
  for (NodeId i = 0; i < num_nodes; ++i) {
    switch (g.split_[i]) {
      case Split::train: g.train_.push_back(i); break;
      case Split::val: g.val_.push_back(i); break;
      case Split::test: g.test_.push_back(i); break;
      case Split::none: break;
    }
  }
  return g;
}

void Graph::rebuild(std::vector<Edge> canonical_edges) {
  std::sort(canonical_edges.begin(), canonical_edges.end());
  canonical_edges.erase(std::unique(canonical_edges.begin(), canonical_edges.end()), canonical_edges.end());

  degree_.assign(num_nodes_, 0);
  for (const Edge& e : canonical_edges) {
    ++degree_[e.u];
    ++degree_[e.v];
  }
  row_ptr_.assign(num_nodes_ + 1, 0);
  for (std::size_t i = 0; i < num_nodes_; ++i) row_ptr_[i + 1] = row_ptr_[i] + degree_[i];
  col_.assign(row_ptr_.back(), 0);
  alive_.assign(row_ptr_.back(), 1);
  std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
  // canonical_edges is sorted by (u, v), so both directions land sorted.
  for (const Edge& e : canonical_edges) col_[fill[e.u]++] = e.v;
  for (const Edge& e : canonical_edges) col_[fill[e.v]++] = e.u;
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    std::sort(col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]),
              col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]));
  }
  num_edges_ = canonical_edges.size();
}

double Graph::average_degree() const noexcept {
  return num_nodes_ == 0 ? 0.0 : 2.0 * static_cast<double>(num_edges_) / static_cast<double>(num_nodes_);
}

void Graph::check_node(NodeId i) const {
  if (i >= num_nodes_) {
    throw InvalidArgument("node id " + std::to_string(i) + " out of range (" + std::to_string(num_nodes_) + " nodes)");
  }
}

namespace {

std::size_t slot_of(const std::vector<std::size_t>& row_ptr, const std::vector<NodeId>& col, NodeId i,
                    NodeId j) {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return CsrMatrix::npos;
  return static_cast<std::size_t>(it - col.begin());
}

}  // namespace

bool Graph::has_edge(NodeId i, NodeId j) const {
  check_node(i);
  check_node(j);
  const std::size_t k = slot_of(row_ptr_, col_, i, j);
  return k != CsrMatrix::npos && alive_[k];
}

std::vector<NodeId> Graph::neighbors(NodeId i) const {
  check_node(i);
  std::vector<NodeId> out;
  out.reserve(degree_[i]);
  for_each_neighbor(i, [&](NodeId j) { out.push_back(j); });
  return out;
}

bool Graph::remove_edge(NodeId i, NodeId j) {
  check_node(i);
  check_node(j);
  const std::size_t a = slot_of(row_ptr_, col_, i, j);
  if (a == CsrMatrix::npos || !alive_[a]) return false;
  const std::size_t b = slot_of(row_ptr_, col_, j, i);
  alive_[a] = 0;
  alive_[b] = 0;
  --degree_[i];
  --degree_[j];
  --num_edges_;
  return true;
}

bool Graph::restore_edge(NodeId i, NodeId j) {
  check_node(i);
  check_node(j);
  const std::size_t a = slot_of(row_ptr_, col_, i, j);
  if (a == CsrMatrix::npos || alive_[a]) return false;
  const std::size_t b = slot_of(row_ptr_, col_, j, i);
  alive_[a] = 1;
  alive_[b] = 1;
  ++degree_[i];
  ++degree_[j];
  ++num_edges_;
  return true;
}

void Graph::add_edges(std::span<const Edge> edges) {
  std::vector<Edge> all = edge_list();
  for (const Edge& e : edges) {
    check_node(e.u);
    check_node(e.v);
    if (e.u != e.v) all.push_back(canonical(e));
  }
  rebuild(std::move(all));
}

void Graph::compact() {
  if (tombstones() == 0) return;
  rebuild(edge_list());
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId i = 0; i < num_nodes_; ++i) {
    for_each_neighbor(i, [&](NodeId j) {
      if (i < j) out.push_back({i, j});
    });
  }
  return out;
}

CsrMatrix Graph::adjacency() const {
  CsrMatrix a;
  a.rows = a.cols = num_nodes_;
  a.row_ptr.assign(num_nodes_ + 1, 0);
  for (NodeId i = 0; i < num_nodes_; ++i) {
    for_each_neighbor(i, [&](NodeId j) {
      a.col.push_back(j);
      a.val.push_back(1.0);
    });
    a.row_ptr[i + 1] = a.col.size();
  }
  return a;
}

std::span<const double> Graph::feature_row(NodeId i) const {
  check_node(i);
  return {features_.data() + static_cast<std::ptrdiff_t>(i) * features_.cols(),
          static_cast<std::size_t>(features_.cols())};
}

bool Graph::same_as(const Graph& other) const {
  return num_nodes_ == other.num_nodes_ && edge_list() == other.edge_list() &&
         features_.rows() == other.features_.rows() && features_.cols() == other.features_.cols() &&
         features_ == other.features_ && labels_ == other.labels_ && split_ == other.split_;
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  NormalizedAdjacency out;
  out.degree.resize(n);
  for (NodeId i = 0; i < n; ++i) out.degree[i] = static_cast<double>(g.degree(i) + 1);

  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(out.degree[i]);

  CsrMatrix& m = out.matrix;
  m.rows = m.cols = n;
  m.row_ptr.assign(n + 1, 0);
  m.col.reserve(2 * g.num_edges() + n);
  m.val.reserve(2 * g.num_edges() + n);
  for (NodeId i = 0; i < n; ++i) {
    bool diag_done = false;
    auto push_diag = [&] {
      m.col.push_back(i);
      m.val.push_back(inv_sqrt[i] * inv_sqrt[i]);
      diag_done = true;
    };
    g.for_each_neighbor(i, [&](NodeId j) {
      if (!diag_done && j > i) push_diag();
      m.col.push_back(j);
      m.val.push_back(inv_sqrt[i] * inv_sqrt[j]);
    });
    if (!diag_done) push_diag();
    m.row_ptr[i + 1] = m.col.size();
  }
  return out;
}

}  // namespace disttack
