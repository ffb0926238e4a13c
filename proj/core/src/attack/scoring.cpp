#include "disttack/attack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "disttack/gnn/model.hpp"
#include "disttack/rng.hpp"

namespace disttack {

TargetRule parse_target_rule(std::string_view name) {
  if (name == "highest_degree") return TargetRule::highest_degree;
  if (name == "random") return TargetRule::random;
  throw InvalidArgument("unknown target rule '" + std::string(name) + "'");
}

std::string_view to_string(TargetRule r) { return r == TargetRule::random ? "random" : "highest_degree"; }

void validate(const AttackConfig& cfg) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string("attack.") + field, what);
  };
  require(std::isfinite(cfg.w_a) && cfg.w_a >= 0.0, "w_a", "must be a finite non-negative number");
  require(std::isfinite(cfg.w_x) && cfg.w_x >= 0.0, "w_x", "must be a finite non-negative number");
  require(std::isfinite(cfg.lambda_comm), "lambda_comm", "must be finite");
  require(cfg.lambda_homo >= 0.0, "lambda_homo", "must be non-negative");
  require(cfg.iterations >= 1, "iterations", "must be >= 1");
  require(cfg.surrogate_epochs >= 0, "surrogate_epochs", "must be >= 0");
  require(cfg.surrogate_hidden >= 1, "surrogate_hidden", "must be >= 1");
  require(cfg.surrogate_lr > 0.0, "surrogate_lr", "must be positive");
  require(cfg.num_targets >= 1, "num_targets", "must be >= 1");
  require(cfg.poisoned_worker >= 0, "poisoned_worker", "must be >= 0");
}

nlohmann::json to_json(const AttackConfig& cfg) {
  return {{"w_a", cfg.w_a},
          {"w_x", cfg.w_x},
          {"lambda_comm", cfg.lambda_comm},
          {"lambda_homo", cfg.lambda_homo},
          {"edge_budget", cfg.edge_budget},
          {"feature_budget", cfg.feature_budget},
          {"iterations", cfg.iterations},
          {"surrogate_epochs", cfg.surrogate_epochs},
          {"surrogate_hidden", cfg.surrogate_hidden},
          {"surrogate_lr", cfg.surrogate_lr},
          {"warm_start", cfg.warm_start},
          {"strict_eq10", cfg.strict_eq10},
          {"num_targets", cfg.num_targets},
          {"target_rule", std::string(to_string(cfg.target_rule))},
          {"poisoned_worker", cfg.poisoned_worker},
          {"measure", std::string(to_string(cfg.measure))},
          {"weighting", std::string(to_string(cfg.weighting))},
          {"seed", cfg.seed}};
}

AttackConfig attack_config_from_json(const nlohmann::json& j, AttackConfig cfg) {
  if (!j.is_object()) throw ConfigError("attack", "must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "w_a") cfg.w_a = value.get<double>();
      else if (key == "w_x") cfg.w_x = value.get<double>();
      else if (key == "lambda_comm") cfg.lambda_comm = value.get<double>();
      else if (key == "lambda_homo") cfg.lambda_homo = value.get<double>();
      else if (key == "edge_budget") cfg.edge_budget = value.get<std::size_t>();
      else if (key == "feature_budget") cfg.feature_budget = value.get<std::size_t>();
      else if (key == "iterations") cfg.iterations = value.get<int>();
      else if (key == "surrogate_epochs") cfg.surrogate_epochs = value.get<int>();
      else if (key == "surrogate_hidden") cfg.surrogate_hidden = value.get<std::size_t>();
      else if (key == "surrogate_lr") cfg.surrogate_lr = value.get<double>();
      else if (key == "warm_start") cfg.warm_start = value.get<bool>();
      else if (key == "strict_eq10") cfg.strict_eq10 = value.get<bool>();
      else if (key == "num_targets") cfg.num_targets = value.get<std::size_t>();
      else if (key == "target_rule") cfg.target_rule = parse_target_rule(value.get<std::string>());
      else if (key == "poisoned_worker") cfg.poisoned_worker = value.get<int>();
      else if (key == "measure") cfg.measure = parse_distance_measure(value.get<std::string>());
      else if (key == "weighting") cfg.weighting = parse_homophily_weighting(value.get<std::string>());
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw ConfigError("attack." + key, "unknown key");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("attack." + key, e.what());
    } catch (const InvalidArgument& e) {
      throw ConfigError("attack." + key, e.what());
    }
  }
  return cfg;
}

ParamSet train_surrogate(const Graph& g, int epochs, std::uint64_t seed, std::size_t hidden, double learning_rate,
                         const ParamSet* warm) {
  if (g.train_nodes().empty()) throw InvalidArgument("train_surrogate: no training nodes");
  ParamSet theta = warm != nullptr ? *warm
                                   : init_params({ModelKind::gcn, hidden, 2}, g.feature_dim(), g.num_classes(),
                                                 learning_rate, derive_seed(seed, stream::surrogate));
  theta.learning_rate = learning_rate;
  const NormalizedAdjacency adj = normalize_adjacency(g);
  for (int e = 0; e < epochs; ++e) {
    const GradientBundle grad = backward(theta, adj, g.features(), g.labels(), g.train_nodes());
    theta = sgd_step(theta, grad);
  }
  return theta;
}

ParamSet train_surrogate(const Graph& g, const AttackConfig& cfg, const ParamSet* warm) {
  return train_surrogate(g, cfg.surrogate_epochs, cfg.seed, cfg.surrogate_hidden, cfg.surrogate_lr, warm);
}

std::vector<NodeId> select_targets(const Graph& g, const Partition& part, const AttackConfig& cfg) {
  if (cfg.poisoned_worker >= part.num_workers) {
    throw InvalidArgument("poisoned worker " + std::to_string(cfg.poisoned_worker) + " does not exist");
  }
  std::vector<NodeId> share = part.train_share(g, cfg.poisoned_worker);
  if (share.empty()) throw InvalidArgument("poisoned worker has no training nodes");
  if (cfg.target_rule == TargetRule::highest_degree) {
    std::stable_sort(share.begin(), share.end(), [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  } else {
    Rng rng(derive_seed(cfg.seed, stream::targets));
    for (std::size_t k = share.size(); k > 1; --k) {
      std::uniform_int_distribution<std::size_t> pick(0, k - 1);
      std::swap(share[k - 1], share[pick(rng)]);
    }
  }
  share.resize(std::min(share.size(), cfg.num_targets));
  return share;
}

SubgraphGradient combined_subgraph_gradient(const ParamSet& theta, const Subgraph& sub, const AttackConfig& cfg) {
  if (sub.size() == 0 || sub.num_targets == 0) throw InvalidArgument("combined_subgraph_gradient: empty subgraph");
  const NormalizedAdjacency adj = normalize_adjacency(sub.local);
  std::vector<NodeId> targets(sub.num_targets);
  std::iota(targets.begin(), targets.end(), NodeId{0});
  GradientBundle grad = attack_backward(theta, adj, sub.local.features(), sub.local.labels(), targets,
                                        {.want_adjacency = true, .want_features = true});
  SubgraphGradient out;
  out.attack_loss = grad.loss;
  out.edge_grad = std::move(*grad.d_adjacency);
  for (double& v : out.edge_grad.val) v *= cfg.w_a;
  out.feature_grad = cfg.w_x * *grad.d_features;
  return out;
}

CsrMatrix communication_matrix(const Subgraph& sub, const Partition& part) {
  for (NodeId gid : sub.global_ids) {
    if (gid >= part.assignment.size()) {
      throw InvalidArgument("node " + std::to_string(gid) + " has no partition assignment");
    }
  }
  CsrMatrix c = sub.local.adjacency();
  for (std::size_t r = 0; r < c.rows; ++r) {
    for (std::size_t k = c.row_ptr[r]; k < c.row_ptr[r + 1]; ++k) {
      c.val[k] = part.is_cross(sub.global_ids[r], sub.global_ids[c.col[k]]) ? 1.0 : -1.0;
    }
  }
  return c;
}

ScoreMatrix edge_scores(const CsrMatrix& edge_grad, const Subgraph& sub, const Partition& part, double lambda_comm) {
  const CsrMatrix comm = communication_matrix(sub, part);
  if (edge_grad.rows != comm.rows || edge_grad.cols != comm.cols) {
    throw InvalidArgument("edge_scores: gradient shape does not match subgraph");
  }
  ScoreMatrix s;
  s.global_ids = sub.global_ids;
  s.scores = comm;  // pattern of A^(sub): the ⊙ A mask
  for (std::size_t r = 0; r < comm.rows; ++r) {
    for (std::size_t k = comm.row_ptr[r]; k < comm.row_ptr[r + 1]; ++k) {
      const std::size_t kg = edge_grad.find(r, comm.col[k]);
      const double grad = kg == CsrMatrix::npos ? 0.0 : edge_grad.val[kg];
      s.scores.val[k] = grad + lambda_comm * comm.val[k];
    }
  }
  // Gradient entries outside the subgraph's edges would be dropped silently
  // by the mask above; reject them instead.
  for (std::size_t r = 0; r < edge_grad.rows; ++r) {
    for (std::size_t k = edge_grad.row_ptr[r]; k < edge_grad.row_ptr[r + 1]; ++k) {
      if (edge_grad.val[k] != 0.0 && comm.find(r, edge_grad.col[k]) == CsrMatrix::npos) {
        throw InvalidArgument("edge_scores: gradient support exceeds subgraph edges");
      }
    }
  }
  return s;
}

std::vector<ScoredEdge> select_edge_removals(const ScoreMatrix& scores, std::size_t k) {
  const CsrMatrix& s = scores.scores;
  auto gid = [&](std::size_t local) {
    return scores.global_ids.empty() ? static_cast<NodeId>(local) : scores.global_ids[local];
  };
  std::vector<ScoredEdge> eligible;
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t p = s.row_ptr[r]; p < s.row_ptr[r + 1]; ++p) {
      if (s.col[p] <= r || !(s.val[p] > 0.0)) continue;
      NodeId a = gid(r), b = gid(s.col[p]);
      if (a > b) std::swap(a, b);
      eligible.push_back({a, b, s.val[p]});
    }
  }
  const std::size_t take = std::min(k, eligible.size());
  std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take), eligible.end(),
                    [](const ScoredEdge& x, const ScoredEdge& y) {
                      if (x.score != y.score) return x.score > y.score;
                      return std::pair(x.i, x.j) < std::pair(y.i, y.j);
                    });
  eligible.resize(take);
  return eligible;
}

FlipResult flip_features(std::span<const double> x_row, std::span<const double> grad_row, std::size_t m,
                         bool strict_eq10) {
  if (x_row.size() != grad_row.size()) throw InvalidArgument("flip_features: dimension mismatch");
  if (m == 0) throw InvalidArgument("flip_features: m must be >= 1");
  std::vector<std::size_t> dims;
  for (std::size_t d = 0; d < grad_row.size(); ++d) {
    if (grad_row[d] != 0.0) dims.push_back(d);
  }
  const std::size_t take = std::min(m, dims.size());
  std::partial_sort(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(take), dims.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ga = std::abs(grad_row[a]), gb = std::abs(grad_row[b]);
                      return ga != gb ? ga > gb : a < b;
                    });
  FlipResult out;
  out.row.assign(x_row.begin(), x_row.end());
  for (std::size_t t = 0; t < take; ++t) {
    const std::size_t d = dims[t];
    const int sign = grad_row[d] > 0.0 ? 1 : -1;
    const double old = out.row[d];
    out.row[d] = strict_eq10 ? old * (1.0 - 2.0 * sign) : -old;
    out.flips.push_back({d, old, out.row[d], sign});
  }
  return out;
}

}  // namespace disttack
