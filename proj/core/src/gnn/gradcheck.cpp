#include "disttack/gnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "disttack/gnn/model.hpp"
#include "disttack/graph/sbm.hpp"
#include "disttack/rng.hpp"

namespace disttack {

namespace {

// Dense re-implementation of the forward pass, kept separate from the
// sparse code path it checks.
struct DenseEval {
  double loss = 0.0;
  std::vector<bool> relu_mask;
};

DenseEval dense_loss(const ParamSet& params, const Matrix& a_raw, const Matrix& x, std::span<const int> labels,
                     std::span<const NodeId> nodes, CheckedLoss kind) {
  const Eigen::Index n = a_raw.rows();
  Matrix a_tilde = a_raw + Matrix::Identity(n, n);
  const Eigen::VectorXd deg = a_tilde.rowwise().sum();
  const Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  const Matrix a_hat = inv_sqrt.asDiagonal() * a_tilde * inv_sqrt.asDiagonal();

  DenseEval out;
  Matrix z;
  if (params.spec.kind == ModelKind::gcn) {
    const Matrix u = a_hat * x * params.weights[0];
    out.relu_mask.resize(static_cast<std::size_t>(u.size()));
    for (Eigen::Index k = 0; k < u.size(); ++k) out.relu_mask[static_cast<std::size_t>(k)] = u.data()[k] > 0.0;
    z = a_hat * u.cwiseMax(0.0) * params.weights[1];
  } else {
    Matrix p = x;
    for (int m = 0; m < params.spec.sgc_steps; ++m) p = a_hat * p;
    z = p * params.weights[0];
  }

  double sum = 0.0;
  for (NodeId i : nodes) {
    const auto row = z.row(i);
    const double mx = row.maxCoeff();
    sum += mx + std::log((row.array() - mx).exp().sum()) - row(labels[i]);
  }
  out.loss = kind == CheckedLoss::mean_ce ? sum / static_cast<double>(nodes.size()) : -sum;
  return out;
}

struct Probe {
  GradCheckGroup& group;
  double epsilon;

  // `nudge(delta)` shifts the coordinate by delta; `eval()` runs the dense forward.
  void run(double analytic, const std::function<void(double)>& nudge, const std::function<DenseEval()>& eval) {
    nudge(+epsilon);
    const DenseEval plus = eval();
    nudge(-2.0 * epsilon);
    const DenseEval minus = eval();
    nudge(+epsilon);
    if (plus.relu_mask != minus.relu_mask) {
      ++group.skipped;
      return;
    }
    const double numeric = (plus.loss - minus.loss) / (2.0 * epsilon);
    const double abs_err = std::abs(analytic - numeric);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    group.max_abs_error = std::max(group.max_abs_error, abs_err);
    group.max_rel_error = std::max(group.max_rel_error, abs_err / denom);
    ++group.checked;
  }
};

}  // namespace

double GradCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& g : groups) m = std::max(m, g.max_rel_error);
  return m;
}

const GradCheckGroup& GradCheckReport::group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return g;
  }
  throw InvalidArgument("no gradient-check group named " + name);
}

GradCheckReport check_gradients(const ParamSet& params, const Graph& g, std::span<const NodeId> nodes,
                                double epsilon, CheckedLoss loss) {
  if (nodes.empty()) throw InvalidArgument("check_gradients: empty node set");
  if (!(epsilon > 0.0)) throw InvalidArgument("check_gradients: epsilon must be positive");
  check_shapes(params, g.feature_dim(), g.num_classes());

  const NormalizedAdjacency adj = normalize_adjacency(g);
  const BackwardOptions opts{.want_adjacency = true, .want_features = true};
  const GradientBundle analytic = loss == CheckedLoss::mean_ce
                                      ? backward(params, adj, g.features(), g.labels(), nodes, opts)
                                      : attack_backward(params, adj, g.features(), g.labels(), nodes, opts);

  ParamSet p = params;
  Matrix x = g.features();
  Matrix a = g.adjacency().to_dense();
  auto eval = [&] { return dense_loss(p, a, x, g.labels(), nodes, loss); };

  GradCheckReport report;
  report.epsilon = epsilon;
  const auto names = params.names();
  report.groups.reserve(names.size() + 2);
  for (std::size_t t = 0; t < p.weights.size(); ++t) {
    GradCheckGroup& grp = report.groups.emplace_back();
    grp.name = names[t];
    Probe probe{grp, epsilon};
    for (Eigen::Index k = 0; k < p.weights[t].size(); ++k) {
      probe.run(analytic.weights[t].data()[k], [&](double d) { p.weights[t].data()[k] += d; }, eval);
    }
  }

  {
    GradCheckGroup& grp = report.groups.emplace_back();
    grp.name = "X";
    Probe probe{grp, epsilon};
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      probe.run(analytic.d_features->data()[k], [&](double d) { x.data()[k] += d; }, eval);
    }
  }

  {
    GradCheckGroup& grp = report.groups.emplace_back();
    grp.name = "A";
    Probe probe{grp, epsilon};
    for (const Edge& e : g.edge_list()) {
      const double dA = analytic.d_adjacency->at(e.u, e.v);
      probe.run(dA,
                [&](double d) {
                  a(e.u, e.v) += d;
                  a(e.v, e.u) += d;
                },
                eval);
    }
  }
  return report;
}

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
  if (opts.nodes < 3) throw InvalidArgument("gradcheck needs at least 3 nodes");
  SbmParams sbm;
  const std::size_t base = opts.nodes / 3;
  sbm.block_sizes = {base, base, opts.nodes - 2 * base};
  sbm.p_intra = 0.5;
  sbm.p_inter = 0.2;
  sbm.feature_dim = std::max<std::size_t>(opts.feature_dim, 3);
  const Graph g = generate_sbm(opts.seed, sbm);
  const ModelSpec spec{.kind = ModelKind::gcn, .hidden = opts.hidden};
  const ParamSet params = init_params(spec, g.feature_dim(), g.num_classes(), 0.1, derive_seed(opts.seed, stream::init));
  std::vector<NodeId> nodes(opts.loss == CheckedLoss::attack ? 3 : g.num_nodes());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<NodeId>(i);
  return check_gradients(params, g, nodes, opts.epsilon, opts.loss);
}

}  // namespace disttack
