#pragma once

#include <span>
#include <vector>

#include "disttack/gnn/params.hpp"
#include "disttack/graph/graph.hpp"

namespace disttack {

// Z = Â ReLU(Â X W0) W1, no output activation.
Matrix gcn_forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x);

// Z = Â^k X W.
Matrix sgc_forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x, int k);

// Dispatches on params.spec.
Matrix forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x);

double cross_entropy(const Matrix& logits, Eigen::Index row, int label);

// Mean cross-entropy over `nodes`.
double masked_ce_loss(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes);

// Negated sum of target cross-entropies.
double attack_loss(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> targets);

struct WeightedNode {
  NodeId node = 0;
  double weight = 0.0;
};

// Loss = sum_k weight_k * ce(z_{node_k}, y_{node_k}); returns d loss / d logits.
Matrix weighted_ce_logit_gradient(const Matrix& logits, std::span<const int> labels,
                                  std::span<const WeightedNode> terms);

struct BackwardOptions {
  bool want_adjacency = false;
  bool want_features = false;
};

/// Reverse-mode gradients of sum_k weight_k * ce(z_k, y_k).
///
/// The adjacency gradient is taken with respect to the entries of the raw,
/// unnormalized A (a symmetric perturbation of A_ij and A_ji together), so
/// it includes the dependence of D̃ on A. It is reported for live edges
/// only. Throws NumericalError if any result is not finite.
GradientBundle backward_weighted(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                                 std::span<const int> labels, std::span<const WeightedNode> terms,
                                 BackwardOptions opts = {});

// Gradients of masked_ce_loss.
GradientBundle backward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                        std::span<const int> labels, std::span<const NodeId> nodes, BackwardOptions opts = {});

// Gradients of attack_loss.
GradientBundle attack_backward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                               std::span<const int> labels, std::span<const NodeId> targets,
                               BackwardOptions opts = {});

std::vector<int> predict(const Matrix& logits);
double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes);

}  // namespace disttack
