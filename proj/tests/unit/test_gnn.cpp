#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "disttack/gnn/checkpoint.hpp"
#include "disttack/gnn/gradcheck.hpp"
#include "disttack/gnn/model.hpp"
#include "helpers.hpp"

using namespace disttack;
using namespace disttack::testing;

namespace {

ParamSet gcn_params(std::size_t f, std::size_t h, std::size_t c, std::uint64_t seed, double lr = 0.1) {
  return init_params({.kind = ModelKind::gcn, .hidden = h}, f, c, lr, seed);
}

// Dense GCN forward with Â built from a (possibly non-binary) symmetric A.
Matrix dense_gcn(const ParamSet& p, const Matrix& a_raw, const Matrix& x) {
  Matrix a = a_raw + Matrix::Identity(a_raw.rows(), a_raw.cols());
  const Eigen::VectorXd d = a.rowwise().sum();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) /= std::sqrt(d(i) * d(j));
  }
  const Matrix h = (a * x * p.weights[0]).cwiseMax(0.0);
  return a * h * p.weights[1];
}

double dense_mean_ce(const Matrix& z, const std::vector<int>& y, const std::vector<NodeId>& nodes) {
  double total = 0.0;
  for (NodeId i : nodes) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    total += lse - z(i, y[i]);
  }
  return total / static_cast<double>(nodes.size());
}

std::vector<NodeId> all_nodes(const Graph& g) {
  std::vector<NodeId> v(g.num_nodes());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("gcn_forward examples") {
  const Graph single = Graph::build(1, {}, Matrix{{1.0, 0.0}}, {0}, {});
  const auto adj = normalize_adjacency(single);
  ParamSet p = gcn_params(2, 2, 2, 0);
  p.weights[0].setIdentity();
  p.weights[1].setIdentity();
  const Matrix z = gcn_forward(p, adj, single.features());
  CHECK(z(0, 0) == 1.0);
  CHECK(z(0, 1) == 0.0);

  const Graph g = random_graph(1, 6, 0.4);
  ParamSet zero = gcn_params(4, 5, 3, 1);
  for (auto& w : zero.weights) w.setZero();
  CHECK(gcn_forward(zero, normalize_adjacency(g), g.features()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gcn_forward matches dense computation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 6, 0.4);
    const ParamSet p = gcn_params(4, 5, 3, seed);
    const Matrix z = gcn_forward(p, normalize_adjacency(g), g.features());
    CHECK((z - dense_gcn(p, dense_adjacency(g), g.features())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gcn_forward rejects bad input") {
  const Graph g = random_graph(2, 6, 0.4);
  const auto adj = normalize_adjacency(g);
  CHECK_THROWS_AS(gcn_forward(gcn_params(3, 5, 3, 0), adj, g.features()), InvalidArgument);
  Matrix x = g.features();
  x(0, 0) = std::nan("");
  CHECK_THROWS_AS(gcn_forward(gcn_params(4, 5, 3, 0), adj, x), NumericalError);
}

TEST_CASE("sgc_forward") {
  const ModelSpec spec{.kind = ModelKind::sgc, .sgc_steps = 2};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 6, 0.4);
    const ParamSet p = init_params(spec, 4, 3, 0.1, seed);
    const auto adj = normalize_adjacency(g);
    const Matrix a = dense_normalized(g);
    const Matrix x = g.features();
    CHECK((sgc_forward(p, adj, x, 1) - a * x * p.weights[0]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sgc_forward(p, adj, x, 2) - a * (a * x) * p.weights[0]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((forward(p, adj, x) - sgc_forward(p, adj, x, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  const Graph iso = plain_graph(3, {}, 4);
  Matrix x = Matrix::Random(3, 4);
  const ParamSet p = init_params(spec, 4, 3, 0.1, 0);
  CHECK((sgc_forward(p, normalize_adjacency(iso), x, 1) - x * p.weights[0]).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(sgc_forward(p, normalize_adjacency(iso), x, 0), InvalidArgument);
}

TEST_CASE("losses") {
  const std::vector<int> labels{0, 1, 2};
  const std::vector<NodeId> all{0, 1, 2};
  CHECK(masked_ce_loss(Matrix::Zero(3, 4), labels, all) == doctest::Approx(std::log(4.0)));

  Matrix peaked = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) peaked(i, i) = 1e6;
  CHECK(masked_ce_loss(peaked, labels, all) == doctest::Approx(0.0));

  // Hand-computed: row0 (1,2,0) label 0, row1 (0,0,0) label 1, row2 (3,1,1) label 2.
  const Matrix z{{1, 2, 0}, {0, 0, 0}, {3, 1, 1}};
  const double ce0 = std::log(std::exp(1.0) + std::exp(2.0) + 1.0) - 1.0;
  const double ce1 = std::log(3.0);
  const double ce2 = std::log(std::exp(3.0) + 2.0 * std::exp(1.0)) - 1.0;
  CHECK(masked_ce_loss(z, labels, all) == doctest::Approx((ce0 + ce1 + ce2) / 3.0).epsilon(1e-14));
  CHECK(cross_entropy(z, 1, 1) == doctest::Approx(ce1));

  CHECK(attack_loss(peaked, labels, std::vector<NodeId>{1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(masked_ce_loss(z, labels, std::vector<NodeId>{}), InvalidArgument);
  CHECK_THROWS_AS(attack_loss(z, labels, std::vector<NodeId>{}), InvalidArgument);
}

TEST_CASE("attack_loss of two targets with known cross-entropies") {
  // ce = ln(1 + e^-m) for a two-class row (m, 0) with label 0.
  const double m0 = -std::log(std::exp(0.5) - 1.0);
  const double m1 = -std::log(std::exp(1.5) - 1.0);
  const Matrix z{{m0, 0.0}, {m1, 0.0}};
  const std::vector<int> labels{0, 0};
  CHECK(cross_entropy(z, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(attack_loss(z, labels, std::vector<NodeId>{0, 1}) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("attack_loss is minus the count times the mean loss") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Matrix z = Matrix::Random(9, 3) * 4.0;
    std::vector<int> labels(9);
    for (auto& y : labels) y = static_cast<int>(rng() % 3);
    std::vector<NodeId> t;
    for (NodeId i = 0; i < 9; ++i) {
      if (rng() % 2 == 0) t.push_back(i);
    }
    if (t.empty()) t.push_back(0);
    const double n = static_cast<double>(t.size());
    CHECK(attack_loss(z, labels, t) == doctest::Approx(-n * masked_ce_loss(z, labels, t)).epsilon(1e-14));
  }
}

TEST_CASE("attack logit gradient matches finite differences") {
  const Matrix z{{0.3, -1.0, 2.0}, {1.0, 0.5, 0.0}, {-0.2, 0.1, 0.4}};
  const std::vector<int> labels{2, 0, 1};
  const std::vector<NodeId> targets{0, 2};
  const std::vector<WeightedNode> terms{{0, -1.0}, {2, -1.0}};
  const Matrix g = weighted_ce_logit_gradient(z, labels, terms);
  const double eps = 1e-6;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      Matrix hi = z, lo = z;
      hi(i, c) += eps;
      lo(i, c) -= eps;
      const double numeric = (attack_loss(hi, labels, targets) - attack_loss(lo, labels, targets)) / (2 * eps);
      CHECK(g(i, c) == doctest::Approx(numeric).epsilon(1e-7));
    }
  }
}

TEST_CASE("backward of a zero-weight network is zero") {
  const Graph g = random_graph(4, 8, 0.4);
  ParamSet p = gcn_params(4, 6, 3, 4);
  for (auto& w : p.weights) w.setZero();
  const auto nodes = all_nodes(g);
  const GradientBundle b = backward(p, normalize_adjacency(g), g.features(), g.labels(), nodes);
  CHECK(b.weights[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.weights[1].cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.l2_norm == 0.0);
}

TEST_CASE("backward matches a dense finite-difference oracle") {
  const double eps = 1e-5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 8 + seed % 5, 0.35);
    const ParamSet p = gcn_params(4, 5, 3, seed + 100);
    const auto nodes = all_nodes(g);
    const GradientBundle b = backward(p, normalize_adjacency(g), g.features(), g.labels(), nodes,
                                      {.want_adjacency = true, .want_features = true});
    const Matrix a0 = dense_adjacency(g);
    auto loss = [&](const ParamSet& q, const Matrix& a, const Matrix& x) {
      return dense_mean_ce(dense_gcn(q, a, x), g.labels(), nodes);
    };
    double worst = 0.0;
    auto compare = [&](double analytic, double numeric) {
      worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
    };
    for (std::size_t k = 0; k < 2; ++k) {
      for (Eigen::Index e = 0; e < p.weights[k].size(); ++e) {
        ParamSet hi = p, lo = p;
        hi.weights[k].data()[e] += eps;
        lo.weights[k].data()[e] -= eps;
        compare(b.weights[k].data()[e], (loss(hi, a0, g.features()) - loss(lo, a0, g.features())) / (2 * eps));
      }
    }
    for (Eigen::Index e = 0; e < g.features().size(); ++e) {
      Matrix hi = g.features(), lo = g.features();
      hi.data()[e] += eps;
      lo.data()[e] -= eps;
      compare(b.d_features->data()[e], (loss(p, a0, hi) - loss(p, a0, lo)) / (2 * eps));
    }
    for (const Edge& e : g.edge_list()) {
      Matrix hi = a0, lo = a0;
      hi(e.u, e.v) += eps;
      hi(e.v, e.u) += eps;
      lo(e.u, e.v) -= eps;
      lo(e.v, e.u) -= eps;
      compare(b.d_adjacency->at(e.u, e.v), (loss(p, hi, g.features()) - loss(p, lo, g.features())) / (2 * eps));
    }
    // A ReLU kink inside the probe is possible but rare at these scales.
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("gradient check property over random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 6 + seed % 11, 0.3);
    const auto nodes = all_nodes(g);
    for (auto kind : {ModelKind::gcn, ModelKind::sgc}) {
      const ParamSet p = init_params({.kind = kind, .hidden = 6, .sgc_steps = 2}, 4, 3, 0.1, seed);
      for (auto loss : {CheckedLoss::mean_ce, CheckedLoss::attack}) {
        const std::vector<NodeId> scope =
            loss == CheckedLoss::attack ? std::vector<NodeId>{0, 1} : nodes;
        // Central differences carry O(eps^2) truncation error; at eps = 1e-4
        // that alone exceeds 1e-4 relative on entries whose true gradient is ~0.
        const GradCheckReport r = check_gradients(p, g, scope, 1e-5, loss);
        CHECK(r.max_rel_error() < 1e-4);
      }
    }
  }
}

TEST_CASE("run_gradcheck on the default 12-node setup") {
  const GradCheckReport r = run_gradcheck({});
  for (const char* name : {"W0", "W1", "X", "A"}) {
    CHECK(r.group(name).max_rel_error < 1e-4);
    CHECK(r.group(name).checked > 0);
  }
}

TEST_CASE("flat loss gives zero feature gradient") {
  const Graph g = plain_graph(5, {{0, 1}, {1, 2}, {3, 4}}, 3, 2);
  ParamSet p = gcn_params(3, 4, 2, 0);
  for (auto& w : p.weights) w.setZero();
  const auto nodes = all_nodes(g);
  const GradCheckReport r = check_gradients(p, g, nodes);
  CHECK(r.group("X").max_abs_error == 0.0);
  const GradientBundle b =
      backward(p, normalize_adjacency(g), g.features(), g.labels(), nodes, {.want_features = true});
  CHECK(b.d_features->cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adjacency gradient is symmetric and norm matches weights") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 14, 0.3);
    const ParamSet p = gcn_params(4, 5, 3, seed);
    const std::vector<NodeId> t{0, 3, 5};
    const GradientBundle b =
        attack_backward(p, normalize_adjacency(g), g.features(), g.labels(), t, {.want_adjacency = true});
    CHECK(b.d_adjacency->is_symmetric(1e-14));
    CHECK(b.d_adjacency->nnz() == 2 * g.num_edges());
    const double expect = std::sqrt(b.weights[0].squaredNorm() + b.weights[1].squaredNorm());
    CHECK(std::abs(b.l2_norm - expect) <= 1e-12 * std::max(1.0, expect));
  }
}

TEST_CASE("sgd_step") {
  ParamSet p{.spec = {.kind = ModelKind::sgc}, .learning_rate = 1.0, .weights = {Matrix{{2.0}}}};
  GradientBundle g;
  g.weights = {Matrix{{0.5}}};
  CHECK(sgd_step(p, g).weights[0](0, 0) == 1.5);
  g.weights = {Matrix{{0.0}}};
  CHECK(sgd_step(p, g).weights[0] == p.weights[0]);

  const ParamSet q = gcn_params(3, 4, 2, 8, 0.25);
  GradientBundle d;
  d.weights = {Matrix::Random(3, 4), Matrix::Random(4, 2)};
  ParamSet doubled = q;
  doubled.learning_rate = 0.5;
  const ParamSet twice = sgd_step(sgd_step(q, d), d);
  const ParamSet once = sgd_step(doubled, d);
  for (std::size_t k = 0; k < 2; ++k) CHECK((twice.weights[k] - once.weights[k]).cwiseAbs().maxCoeff() < 1e-15);

  d.weights.pop_back();
  CHECK_THROWS_AS(sgd_step(q, d), InvalidArgument);
}

TEST_CASE("full-batch descent lowers the loss") {
  const Graph g = small_sbm(11, {20, 20}, 0.3, 0.05, 6);
  ParamSet p = gcn_params(6, 8, 2, 11, 0.2);
  const auto adj = normalize_adjacency(g);
  const auto& train = g.train_nodes();
  double prev = masked_ce_loss(forward(p, adj, g.features()), g.labels(), train);
  int decreased = 0;
  for (int step = 0; step < 50; ++step) {
    p = sgd_step(p, backward(p, adj, g.features(), g.labels(), train));
    const double now = masked_ce_loss(forward(p, adj, g.features()), g.labels(), train);
    decreased += now < prev ? 1 : 0;
    prev = now;
  }
  CHECK(decreased >= 45);
}

TEST_CASE("logits are permutation equivariant") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 12, 0.3);
    std::vector<NodeId> perm = all_nodes(g);
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> edges;
    for (const Edge& e : g.edge_list()) edges.push_back({perm[e.u], perm[e.v]});
    Matrix x(g.features().rows(), g.features().cols());
    std::vector<int> labels(g.num_nodes());
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      x.row(perm[i]) = g.features().row(i);
      labels[perm[i]] = g.label(i);
    }
    const Graph h = Graph::build(g.num_nodes(), edges, x, labels, {});
    const ParamSet p = gcn_params(4, 5, 3, seed);
    const Matrix zg = gcn_forward(p, normalize_adjacency(g), g.features());
    const Matrix zh = gcn_forward(p, normalize_adjacency(h), h.features());
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      CHECK((zg.row(i) - zh.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("init_params shapes and determinism") {
  const ParamSet a = gcn_params(7, 5, 3, 42);
  CHECK(a.weights[0].rows() == 7);
  CHECK(a.weights[0].cols() == 5);
  CHECK(a.weights[1].rows() == 5);
  CHECK(a.weights[1].cols() == 3);
  CHECK(a.weights[0] == gcn_params(7, 5, 3, 42).weights[0]);
  CHECK_NOTHROW(check_shapes(a, 7, 3));
  CHECK_THROWS_AS(check_shapes(a, 6, 3), InvalidArgument);
  CHECK(a.names() == std::vector<std::string>{"W0", "W1"});
  CHECK(init_params({.kind = ModelKind::sgc}, 7, 3, 0.1, 0).names() == std::vector<std::string>{"W"});
  CHECK_THROWS_AS(parse_model_kind("gat"), InvalidArgument);
}

TEST_CASE("checkpoint round-trip") {
  const auto prefix = std::filesystem::temp_directory_path() / "disttack_ckpt";
  for (auto kind : {ModelKind::gcn, ModelKind::sgc}) {
    const ParamSet p = init_params({.kind = kind, .hidden = 5, .sgc_steps = 3}, 4, 3, 0.37, 5);
    save_checkpoint(p, prefix);
    const ParamSet q = load_checkpoint(prefix);
    CHECK(q.spec == p.spec);
    CHECK(q.learning_rate == p.learning_rate);
    REQUIRE(q.weights.size() == p.weights.size());
    for (std::size_t k = 0; k < p.weights.size(); ++k) CHECK(q.weights[k] == p.weights[k]);
  }
  CHECK(std::filesystem::file_size(prefix.string() + ".bin") == 4 * 3 * sizeof(double));
  CHECK_THROWS_AS(load_checkpoint(prefix.string() + "_missing"), IoError);
}
