#include <algorithm>
#include <optional>
#include <set>

#include "disttack/attack/attack.hpp"
#include "disttack/rng.hpp"

namespace disttack {

namespace {

constexpr int kMaxDraws = 64;

// Working state shared by the random baselines. Removed edges stay
// tombstoned in `work`; additions are only tracked, so an added edge is
// never removed again and a removed edge never re-added.
class EdgeSampler {
 public:
  EdgeSampler(const Graph& g, const Partition& part, int worker, std::uint64_t seed)
      : work_(g), share_(part.train_share(g, worker)), rng_(seed) {
    if (share_.empty()) throw InvalidArgument("poisoned worker has no training nodes");
  }

  Rng& rng() { return rng_; }
  const std::vector<NodeId>& share() const { return share_; }
  const Graph& graph() const { return work_; }

  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  template <class Pred>
  std::optional<Edge> draw_removal(Pred&& keep) {
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      const NodeId u = pick(share_);
      const auto nb = work_.neighbors(u);
      if (nb.empty()) continue;
      const NodeId v = pick(nb);
      const Edge e = canonical({u, v});
      if (added_.contains(e) || !keep(u, v)) continue;
      return e;
    }
    return std::nullopt;
  }

  template <class Pred>
  std::optional<Edge> draw_addition(Pred&& keep) {
    std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(work_.num_nodes() - 1));
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      const NodeId u = pick(share_);
      const NodeId v = any(rng_);
      if (u == v) continue;
      const Edge e = canonical({u, v});
      if (work_.has_edge(u, v) || added_.contains(e) || removed_.contains(e) || !keep(u, v)) continue;
      return e;
    }
    return std::nullopt;
  }

  void remove(const Edge& e, PerturbationSet& out) {
    work_.remove_edge(e.u, e.v);
    removed_.insert(e);
    out.edges_removed.push_back({e.u, e.v, 0.0, 0});
  }

  void add(const Edge& e, PerturbationSet& out) {
    added_.insert(e);
    out.edges_added.push_back({e.u, e.v, 0.0, 0});
  }

 private:
  NodeId pick(const std::vector<NodeId>& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng_)];
  }

  Graph work_;
  std::vector<NodeId> share_;
  Rng rng_;
  std::set<Edge> removed_;
  std::set<Edge> added_;
};

nlohmann::json baseline_config(const char* method, std::size_t edge_budget, std::size_t feature_budget,
                               std::uint64_t seed, int worker) {
  return {{"method", method},
          {"edge_budget", edge_budget},
          {"feature_budget", feature_budget},
          {"seed", seed},
          {"poisoned_worker", worker}};
}

}  // namespace

PerturbationSet baseline_random(const Graph& g, const Partition& part, std::size_t edge_budget,
                                std::size_t feature_budget, std::uint64_t seed, int worker) {
  PerturbationSet out;
  out.config = baseline_config("random", edge_budget, feature_budget, seed, worker);
  if (edge_budget == 0 && feature_budget == 0) return out;
  EdgeSampler s(g, part, worker, derive_seed(seed, stream::baseline));
  const auto any = [](NodeId, NodeId) { return true; };

  for (std::size_t k = 0; k < edge_budget; ++k) {
    if (s.coin()) {
      if (auto e = s.draw_removal(any)) s.remove(*e, out);
    } else {
      if (auto e = s.draw_addition(any)) s.add(*e, out);
    }
  }

  // Feature sign flips on non-zero entries of the share, each entry at most once.
  std::vector<std::pair<NodeId, std::size_t>> entries;
  const Matrix& x = g.features();
  for (NodeId u : s.share()) {
    for (std::size_t d = 0; d < g.feature_dim(); ++d) {
      if (x(u, static_cast<Eigen::Index>(d)) != 0.0) entries.emplace_back(u, d);
    }
  }
  const std::size_t m = std::min(feature_budget, entries.size());
  for (std::size_t k = 0; k < m; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, entries.size() - 1);
    std::swap(entries[k], entries[pick(s.rng())]);
    const auto [u, d] = entries[k];
    const double old = x(u, static_cast<Eigen::Index>(d));
    out.features_flipped.push_back({u, d, old, -old, 0, 0});
  }
  return out;
}

PerturbationSet baseline_dice(const Graph& g, const Partition& part, std::size_t edge_budget, std::uint64_t seed,
                              int worker) {
  PerturbationSet out;
  out.config = baseline_config("dice", edge_budget, 0, seed, worker);
  if (edge_budget == 0) return out;
  EdgeSampler s(g, part, worker, derive_seed(seed, stream::baseline + 1));
  const auto same = [&](NodeId u, NodeId v) { return g.label(u) == g.label(v); };
  const auto differ = [&](NodeId u, NodeId v) { return g.label(u) != g.label(v); };

  for (std::size_t k = 0; k < edge_budget; ++k) {
    if (s.coin()) {
      if (auto e = s.draw_removal(same)) s.remove(*e, out);
    } else {
      if (auto e = s.draw_addition(differ)) s.add(*e, out);
    }
  }
  return out;
}

}  // namespace disttack
