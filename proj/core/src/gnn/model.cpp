#include "disttack/gnn/model.hpp"

#include <cmath>
#include <string>

namespace disttack {

namespace {

void check_input(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x) {
  if (adj.matrix.rows != static_cast<std::size_t>(x.rows())) {
    throw InvalidArgument("adjacency has " + std::to_string(adj.matrix.rows) + " rows but X has " +
                          std::to_string(x.rows()));
  }
  if (params.weights.empty() || params.weights[0].rows() != x.cols()) {
    throw InvalidArgument("first weight matrix does not match feature_dim");
  }
  if (params.spec.kind == ModelKind::gcn &&
      (params.weights.size() != 2 || params.weights[0].cols() != params.weights[1].rows())) {
    throw InvalidArgument("GCN weight shapes are inconsistent");
  }
  if (!x.allFinite()) throw NumericalError("non-finite input features");
  if (!params.all_finite()) throw NumericalError("non-finite weights");
}

struct GcnCache {
  Matrix p;  // Â X
  Matrix u;  // P W0
  Matrix h;  // ReLU(U)
  Matrix q;  // Â H
  Matrix z;  // Q W1
};

GcnCache gcn_cached(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x) {
  GcnCache c;
  c.p = adj.matrix.multiply(x);
  c.u = c.p * params.weights[0];
  c.h = c.u.cwiseMax(0.0);
  c.q = adj.matrix.multiply(c.h);
  c.z = c.q * params.weights[1];
  return c;
}

// propagated[m] = Â^m X for m = 0..k
std::vector<Matrix> sgc_propagations(const NormalizedAdjacency& adj, const Matrix& x, int k) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  out.push_back(x);
  for (int m = 0; m < k; ++m) out.push_back(adj.matrix.multiply(out.back()));
  return out;
}

// grad_entries[k] += <upstream.row(i), input.row(j)> for each stored (i, j).
void accumulate_entry_grad(const CsrMatrix& a, const Matrix& upstream, const Matrix& input,
                           std::vector<double>& grad_entries) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const auto up = upstream.row(static_cast<Eigen::Index>(i));
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      grad_entries[k] += up.dot(input.row(a.col[k]));
    }
  }
}

// Chain rule from d loss / d Â_ij (all stored entries, incl. diagonal) to
// d loss / d A_ij for a symmetric perturbation of the raw adjacency.
CsrMatrix adjacency_gradient(const NormalizedAdjacency& adj, const std::vector<double>& g_hat) {
  const CsrMatrix& a = adj.matrix;
  const std::size_t n = a.rows;

  // d loss / d d̃_m = -(1 / (2 d̃_m)) * (sum_j G_mj Â_mj + sum_i G_im Â_im)
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const double w = g_hat[k] * a.val[k];
      s[i] += w;
      s[a.col[k]] += w;
    }
  }
  for (std::size_t m = 0; m < n; ++m) s[m] *= -0.5 / adj.degree[m];

  CsrMatrix out;
  out.rows = out.cols = n;
  out.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const NodeId j = a.col[k];
      if (j == i) continue;
      const std::size_t kt = a.find(j, static_cast<NodeId>(i));
      out.col.push_back(j);
      out.val.push_back((g_hat[k] + g_hat[kt]) * a.val[k] + s[i] + s[j]);
    }
    out.row_ptr[i + 1] = out.col.size();
  }
  return out;
}

double weighted_loss(const Matrix& logits, std::span<const int> labels, std::span<const WeightedNode> terms) {
  double loss = 0.0;
  for (const WeightedNode& t : terms) loss += t.weight * cross_entropy(logits, t.node, labels[t.node]);
  return loss;
}

void check_finite(const GradientBundle& b) {
  for (const Matrix& w : b.weights) {
    if (!w.allFinite()) throw NumericalError("non-finite weight gradient");
  }
  if (b.d_features && !b.d_features->allFinite()) throw NumericalError("non-finite feature gradient");
  if (b.d_adjacency) {
    for (double v : b.d_adjacency->val) {
      if (!std::isfinite(v)) throw NumericalError("non-finite adjacency gradient");
    }
  }
  if (!std::isfinite(b.loss)) throw NumericalError("non-finite loss");
}

}  // namespace

Matrix gcn_forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x) {
  check_input(params, adj, x);
  if (params.spec.kind != ModelKind::gcn) throw InvalidArgument("gcn_forward called with non-GCN params");
  return gcn_cached(params, adj, x).z;
}

Matrix sgc_forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x, int k) {
  check_input(params, adj, x);
  if (params.spec.kind != ModelKind::sgc) throw InvalidArgument("sgc_forward called with non-SGC params");
  if (k < 1) throw InvalidArgument("SGC propagation depth must be >= 1");
  Matrix p = x;
  for (int m = 0; m < k; ++m) p = adj.matrix.multiply(p);
  return p * params.weights[0];
}

Matrix forward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x) {
  if (params.spec.kind == ModelKind::gcn) return gcn_forward(params, adj, x);
  return sgc_forward(params, adj, x, params.spec.sgc_steps);
}

double cross_entropy(const Matrix& logits, Eigen::Index row, int label) {
  const auto z = logits.row(row);
  const double mx = z.maxCoeff();
  const double lse = mx + std::log((z.array() - mx).exp().sum());
  return lse - z(label);
}

double masked_ce_loss(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InvalidArgument("masked_ce_loss: empty node set");
  double sum = 0.0;
  for (NodeId i : nodes) {
    if (i >= static_cast<std::size_t>(logits.rows())) throw InvalidArgument("masked_ce_loss: node id out of range");
    sum += cross_entropy(logits, i, labels[i]);
  }
  return sum / static_cast<double>(nodes.size());
}

double attack_loss(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> targets) {
  if (targets.empty()) throw InvalidArgument("attack_loss: empty target set");
  double sum = 0.0;
  for (NodeId i : targets) {
    if (i >= static_cast<std::size_t>(logits.rows())) throw InvalidArgument("attack_loss: node id out of range");
    sum += cross_entropy(logits, i, labels[i]);
  }
  return -sum;
}

Matrix weighted_ce_logit_gradient(const Matrix& logits, std::span<const int> labels,
                                  std::span<const WeightedNode> terms) {
  Matrix dz = Matrix::Zero(logits.rows(), logits.cols());
  for (const WeightedNode& t : terms) {
    if (t.node >= static_cast<std::size_t>(logits.rows())) throw InvalidArgument("loss node id out of range");
    const auto z = logits.row(t.node);
    const double mx = z.maxCoeff();
    Eigen::RowVectorXd e = (z.array() - mx).exp();
    e /= e.sum();
    e(labels[t.node]) -= 1.0;
    dz.row(t.node) += t.weight * e;
  }
  return dz;
}

GradientBundle backward_weighted(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                                 std::span<const int> labels, std::span<const WeightedNode> terms,
                                 BackwardOptions opts) {
  check_input(params, adj, x);
  if (terms.empty()) throw InvalidArgument("backward: empty node set");
  if (labels.size() != static_cast<std::size_t>(x.rows())) throw InvalidArgument("backward: label count mismatch");

  const CsrMatrix& a = adj.matrix;
  GradientBundle out;
  std::vector<double> g_hat;
  if (opts.want_adjacency) g_hat.assign(a.nnz(), 0.0);

  if (params.spec.kind == ModelKind::gcn) {
    const Matrix& w0 = params.weights[0];
    const Matrix& w1 = params.weights[1];
    const GcnCache c = gcn_cached(params, adj, x);
    out.loss = weighted_loss(c.z, labels, terms);
    const Matrix dz = weighted_ce_logit_gradient(c.z, labels, terms);

    Matrix dw1 = c.q.transpose() * dz;
    const Matrix dq = dz * w1.transpose();
    if (opts.want_adjacency) accumulate_entry_grad(a, dq, c.h, g_hat);
    // Â is symmetric, so Âᵀ dQ = Â dQ.
    Matrix du = a.multiply(dq);
    du.array() *= (c.u.array() > 0.0).cast<double>();
    Matrix dw0 = c.p.transpose() * du;
    if (opts.want_adjacency || opts.want_features) {
      const Matrix dp = du * w0.transpose();
      if (opts.want_adjacency) accumulate_entry_grad(a, dp, x, g_hat);
      if (opts.want_features) out.d_features = a.multiply(dp);
    }
    out.weights.push_back(std::move(dw0));
    out.weights.push_back(std::move(dw1));
  } else {
    const int k = params.spec.sgc_steps;
    if (k < 1) throw InvalidArgument("SGC propagation depth must be >= 1");
    const Matrix& w = params.weights[0];
    const auto props = sgc_propagations(adj, x, k);
    const Matrix z = props.back() * w;
    out.loss = weighted_loss(z, labels, terms);
    const Matrix dz = weighted_ce_logit_gradient(z, labels, terms);
    out.weights.push_back(props.back().transpose() * dz);
    if (opts.want_adjacency || opts.want_features) {
      Matrix dp = dz * w.transpose();
      for (int m = k; m >= 1; --m) {
        if (opts.want_adjacency) accumulate_entry_grad(a, dp, props[static_cast<std::size_t>(m - 1)], g_hat);
        dp = a.multiply(dp);
      }
      if (opts.want_features) out.d_features = std::move(dp);
    }
  }

  if (opts.want_adjacency) out.d_adjacency = adjacency_gradient(adj, g_hat);
  out.refresh_norm();
  check_finite(out);
  return out;
}

GradientBundle backward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                        std::span<const int> labels, std::span<const NodeId> nodes, BackwardOptions opts) {
  if (nodes.empty()) throw InvalidArgument("backward: empty node set");
  const double w = 1.0 / static_cast<double>(nodes.size());
  std::vector<WeightedNode> terms;
  terms.reserve(nodes.size());
  for (NodeId i : nodes) terms.push_back({i, w});
  return backward_weighted(params, adj, x, labels, terms, opts);
}

GradientBundle attack_backward(const ParamSet& params, const NormalizedAdjacency& adj, const Matrix& x,
                               std::span<const int> labels, std::span<const NodeId> targets,
                               BackwardOptions opts) {
  if (targets.empty()) throw InvalidArgument("attack_backward: empty target set");
  std::vector<WeightedNode> terms;
  terms.reserve(targets.size());
  for (NodeId i : targets) terms.push_back({i, -1.0});
  return backward_weighted(params, adj, x, labels, terms, opts);
}

std::vector<int> predict(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

double accuracy(const Matrix& logits, std::span<const int> labels, std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t correct = 0;
  for (NodeId i : nodes) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

}  // namespace disttack
