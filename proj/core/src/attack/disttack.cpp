#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include "disttack/attack/attack.hpp"

namespace disttack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

struct FeatureCandidate {
  NodeId node = 0;  // parent id
  NodeId local = 0;
  std::size_t dim = 0;
  double grad = 0.0;
  double score = 0.0;  // |grad|
};

// Shared state of one attack run.
class AttackState {
 public:
  AttackState(const Graph& g, const AttackConfig& cfg, PerturbationSet& out)
      : cfg_(cfg), work_(g), tracker_(g, cfg.weighting, cfg.measure), out_(out) {}

  Graph& graph() { return work_; }

  std::size_t remove_edges(const ScoreMatrix& scores, std::size_t quota, int iter) {
    if (quota == 0) return 0;
    if (cfg_.lambda_homo == 0.0) {
      const auto picks = select_edge_removals(scores, quota);
      for (const ScoredEdge& e : picks) {
        apply_edge(e, e.score, edge_changes(e), iter);
      }
      return picks.size();
    }

    // Greedy on the penalized score. Candidates come sorted by raw score and
    // the penalty is non-negative, so the scan stops once the raw score
    // drops below the best penalized score found.
    auto candidates = select_edge_removals(scores, std::numeric_limits<std::size_t>::max());
    std::vector<bool> used(candidates.size(), false);
    std::size_t applied = 0;
    for (; applied < quota; ++applied) {
      std::optional<std::size_t> best;
      double best_score = 0.0;
      std::vector<HomophilyChange> best_changes;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[c]) continue;
        const ScoredEdge& e = candidates[c];
        if (best && e.score < best_score) break;
        auto changes = edge_changes(e);
        const double adjusted = e.score - penalty(changes);
        if (!(adjusted > 0.0)) continue;
        const bool better = !best || adjusted > best_score ||
                            (adjusted == best_score &&
                             std::pair(e.i, e.j) < std::pair(candidates[*best].i, candidates[*best].j));
        if (better) {
          best = c;
          best_score = adjusted;
          best_changes = std::move(changes);
        }
      }
      if (!best) break;
      used[*best] = true;
      apply_edge(candidates[*best], best_score, best_changes, iter);
    }
    return applied;
  }

  std::size_t flip(const Subgraph& sub, const Matrix& feature_grad, std::size_t quota, int iter) {
    if (quota == 0) return 0;
    std::vector<FeatureCandidate> candidates;
    const Matrix& x = work_.features();
    for (NodeId a = 0; a < sub.size(); ++a) {
      const NodeId node = sub.global_ids[a];
      for (std::size_t d = 0; d < work_.feature_dim(); ++d) {
        const double g = feature_grad(a, static_cast<Eigen::Index>(d));
        if (g == 0.0 || flipped_.contains({node, d})) continue;
        const double old = x(node, static_cast<Eigen::Index>(d));
        const double updated = cfg_.strict_eq10 ? old * (g > 0.0 ? -1.0 : 3.0) : -old;
        // Keep only flips that lower the attack loss to first order.
        if (!(g * (updated - old) < 0.0)) continue;
        candidates.push_back({node, a, d, g, std::abs(g)});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const FeatureCandidate& p, const FeatureCandidate& q) {
      if (p.score != q.score) return p.score > q.score;
      return std::pair(p.node, p.dim) < std::pair(q.node, q.dim);
    });

    std::vector<bool> used(candidates.size(), false);
    std::size_t applied = 0;
    for (; applied < quota; ++applied) {
      std::optional<std::size_t> best;
      double best_score = 0.0;
      std::vector<HomophilyChange> best_changes;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[c]) continue;
        const FeatureCandidate& f = candidates[c];
        if (best && f.score < best_score) break;
        auto changes = feature_changes(f);
        const double adjusted = cfg_.lambda_homo == 0.0 ? f.score : f.score - penalty(changes);
        if (!(adjusted > 0.0)) continue;
        if (!best || adjusted > best_score) {
          best = c;
          best_score = adjusted;
          best_changes = std::move(changes);
        }
        if (cfg_.lambda_homo == 0.0) break;  // sorted: first eligible wins
      }
      if (!best) break;
      used[*best] = true;
      apply_flip(candidates[*best], best_changes, iter);
    }
    return applied;
  }

 private:
  std::vector<HomophilyChange> edge_changes(const ScoredEdge& e) {
    const auto affected = nodes_affected_by_edge(work_, e.i, e.j);
    work_.remove_edge(e.i, e.j);
    auto changes = tracker_.evaluate(work_, affected);
    work_.restore_edge(e.i, e.j);
    return changes;
  }

  std::vector<HomophilyChange> feature_changes(const FeatureCandidate& f) {
    double& slot = work_.mutable_features()(f.node, static_cast<Eigen::Index>(f.dim));
    const double old = slot;
    slot = cfg_.strict_eq10 ? old * (f.grad > 0.0 ? -1.0 : 3.0) : -old;
    auto changes = tracker_.evaluate(work_, nodes_affected_by_feature(work_, f.node));
    slot = old;
    return changes;
  }

  double penalty(const std::vector<HomophilyChange>& changes) const {
    return cfg_.lambda_homo * std::abs(tracker_.distance_with(changes) - tracker_.current_distance());
  }

  void apply_edge(const ScoredEdge& e, double score, const std::vector<HomophilyChange>& changes, int iter) {
    const double pen = penalty(changes);
    if (!work_.remove_edge(e.i, e.j)) throw Error("internal: selected edge is not live");
    tracker_.commit(changes);
    out_.edges_removed.push_back({e.i, e.j, score, iter});
    out_.homophily_penalties.push_back(pen);
  }

  void apply_flip(const FeatureCandidate& f, const std::vector<HomophilyChange>& changes, int iter) {
    const double pen = penalty(changes);
    Matrix& x = work_.mutable_features();
    const auto dim = static_cast<Eigen::Index>(work_.feature_dim());
    std::vector<double> mask(static_cast<std::size_t>(dim), 0.0);
    mask[f.dim] = f.grad;
    const FlipResult r = flip_features(work_.feature_row(f.node), mask, 1, cfg_.strict_eq10);
    for (Eigen::Index d = 0; d < dim; ++d) x(f.node, d) = r.row[static_cast<std::size_t>(d)];
    tracker_.commit(changes);
    flipped_.insert({f.node, f.dim});
    const FlipRecord& rec = r.flips.front();
    out_.features_flipped.push_back({f.node, rec.dim, rec.old_value, rec.new_value, rec.sign, iter});
    out_.homophily_penalties.push_back(pen);
  }

  const AttackConfig& cfg_;
  Graph work_;
  HomophilyTracker tracker_;
  PerturbationSet& out_;
  std::set<std::pair<NodeId, std::size_t>> flipped_;
};

}  // namespace

PerturbationSet run_disttack(const Graph& g, const Partition& part, const AttackConfig& cfg,
                             std::span<const NodeId> targets, AttackTrace* trace) {
  validate(cfg);
  if (targets.empty()) throw InvalidArgument("run_disttack: no targets");
  if (part.assignment.size() != g.num_nodes()) throw InvalidArgument("run_disttack: partition does not cover graph");
  for (NodeId t : targets) {
    g.check_node(t);
    if (part.worker_of(t) != cfg.poisoned_worker || g.split_of(t) != Split::train) {
      throw InvalidArgument("target " + std::to_string(t) + " is not on the poisoned worker's training share");
    }
  }

  const auto start = Clock::now();
  PerturbationSet out;
  out.config = to_json(cfg);
  out.config["targets"] = std::vector<NodeId>(targets.begin(), targets.end());
  out.config["method"] = "disttack";

  AttackState state(g, cfg, out);
  std::optional<ParamSet> theta;
  std::size_t remaining_edges = cfg.edge_budget;
  std::size_t remaining_flips = cfg.feature_budget;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    if (remaining_edges == 0 && remaining_flips == 0) break;
    AttackIterationTrace it;
    it.iter = iter;

    auto t0 = Clock::now();
    const ParamSet* warm = cfg.warm_start && theta ? &*theta : nullptr;
    theta = train_surrogate(state.graph(), cfg, warm);
    it.surrogate_seconds = seconds_since(t0);

    t0 = Clock::now();
    const Subgraph sub = sample_1hop(state.graph(), targets);
    const SubgraphGradient grad = combined_subgraph_gradient(*theta, sub, cfg);
    const ScoreMatrix scores = edge_scores(grad.edge_grad, sub, part, cfg.lambda_comm);

    const auto iters_left = static_cast<std::size_t>(cfg.iterations - iter);
    it.edges_removed = state.remove_edges(scores, ceil_div(remaining_edges, iters_left), iter);
    it.features_flipped = state.flip(sub, grad.feature_grad, ceil_div(remaining_flips, iters_left), iter);
    if (state.graph().tombstones() > state.graph().num_edges()) state.graph().compact();
    it.perturb_seconds = seconds_since(t0);

    it.subgraph_nodes = sub.size();
    it.subgraph_edges = sub.local.num_edges();
    it.surrogate_attack_loss = grad.attack_loss;
    remaining_edges -= it.edges_removed;
    remaining_flips -= it.features_flipped;
    if (trace != nullptr) trace->iterations.push_back(it);
    if (it.edges_removed == 0 && it.features_flipped == 0) break;  // nothing eligible left
  }
  if (trace != nullptr) trace->total_seconds = seconds_since(start);
  return out;
}

}  // namespace disttack
