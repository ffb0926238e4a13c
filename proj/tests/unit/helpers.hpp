#pragma once

#include <random>
#include <vector>

#include "disttack/graph/graph.hpp"
#include "disttack/graph/sbm.hpp"
#include "disttack/rng.hpp"

namespace disttack::testing {

inline Matrix zeros(std::size_t n, std::size_t d) { return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)); }

// Graph with the given edges, zero features of width d and labels i % classes.
inline Graph plain_graph(std::size_t n, std::vector<Edge> edges, std::size_t d = 2, int classes = 2) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i) % classes;
  return Graph::build(n, edges, zeros(n, d), labels, {});
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return plain_graph(n, e);
}

// Center 0 joined to 1..leaves.
inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= leaves; ++i) e.push_back({0, i});
  return plain_graph(leaves + 1, e);
}

/// Erdos-Renyi graph with N(0,1) features, `classes` labels and every node in
/// the training split (other splits empty unless `split` is set).
inline Graph random_graph(std::uint64_t seed, std::size_t n, double p, std::size_t d = 4, int classes = 3,
                          bool split = false) {
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  std::normal_distribution<double> normal;
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.push_back({i, j});
    }
  }
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
  std::vector<int> labels(n);
  for (auto& y : labels) y = std::uniform_int_distribution<int>(0, classes - 1)(rng);
  for (int c = 0; c < classes && static_cast<std::size_t>(c) < n; ++c) labels[static_cast<std::size_t>(c)] = c;
  SplitLists s;
  for (NodeId i = 0; i < n; ++i) {
    if (!split || i % 3 == 0) s.train.push_back(i);
    else if (i % 3 == 1) s.val.push_back(i);
    else s.test.push_back(i);
  }
  return Graph::build(n, edges, x, labels, s);
}

inline Graph small_sbm(std::uint64_t seed, std::vector<std::size_t> blocks = {15, 15}, double p_intra = 0.3,
                       double p_inter = 0.05, std::size_t d = 8) {
  SbmParams p;
  p.block_sizes = std::move(blocks);
  p.p_intra = p_intra;
  p.p_inter = p_inter;
  p.feature_dim = d;
  return generate_sbm(seed, p);
}

// Dense raw adjacency.
inline Matrix dense_adjacency(const Graph& g) {
  Matrix a = zeros(g.num_nodes(), g.num_nodes());
  for (const Edge& e : g.edge_list()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

// D̃^{-1/2}(A + I)D̃^{-1/2} built densely.
inline Matrix dense_normalized(const Graph& g) {
  Matrix a = dense_adjacency(g);
  a += Matrix::Identity(a.rows(), a.cols());
  const Eigen::VectorXd d = a.rowwise().sum();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) /= std::sqrt(d(i) * d(j));
  }
  return a;
}

}  // namespace disttack::testing
