#include "disttack/exp/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "disttack/gnn/model.hpp"
#include "disttack/graph/graph_io.hpp"
#include "disttack/rng.hpp"

namespace disttack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double evaluate(const ParamSet& params, const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  const Matrix logits = forward(params, normalize_adjacency(g), g.features());
  return accuracy(logits, g.labels(), nodes);
}

}  // namespace

Graph build_graph(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.dataset.kind == DatasetSpec::Kind::sbm) return generate_sbm(seed, cfg.dataset.sbm);
  return load_graph(cfg.dataset.edges, cfg.dataset.nodes, cfg.dataset.splits);
}

double positive_fraction(const std::vector<double>& divergence, int start) {
  const auto from = static_cast<std::size_t>(std::max(start, 0));
  if (from >= divergence.size()) return 0.0;
  std::size_t above = 0;
  for (std::size_t e = from; e < divergence.size(); ++e) above += divergence[e] > 0.0 ? 1 : 0;
  return static_cast<double>(above) / static_cast<double>(divergence.size() - from);
}

RunResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const PerturbationSet* poison) {
  const auto start = Clock::now();
  RunResult r;
  r.seed = seed;
  try {
    const Graph g = build_graph(cfg, seed);
    r.num_nodes = g.num_nodes();
    r.num_edges = g.num_edges();
    const Partition part = partition_nodes(g, cfg.workers, cfg.partition, seed);

    AttackConfig acfg = cfg.attack_cfg;
    acfg.seed = seed;
    if (cfg.edge_budget_fraction) {
      acfg.edge_budget = static_cast<std::size_t>(std::llround(*cfg.edge_budget_fraction * static_cast<double>(g.num_edges())));
    }
    r.edge_budget = acfg.edge_budget;
    r.targets = select_targets(g, part, acfg);

    const auto attack_start = Clock::now();
    if (poison != nullptr) {
      r.perturbations = *poison;
    } else {
      switch (cfg.attack) {
        case AttackMethod::none: break;
        case AttackMethod::disttack: r.perturbations = run_disttack(g, part, acfg, r.targets); break;
        case AttackMethod::random:
          r.perturbations =
              baseline_random(g, part, acfg.edge_budget, acfg.feature_budget, seed, acfg.poisoned_worker);
          break;
        case AttackMethod::dice:
          r.perturbations = baseline_dice(g, part, acfg.edge_budget, seed, acfg.poisoned_worker);
          break;
      }
    }
    r.attack_seconds = seconds_since(attack_start);
    r.edges_removed = r.perturbations.edges_removed.size();
    r.edges_added = r.perturbations.edges_added.size();
    r.features_flipped = r.perturbations.features_flipped.size();

    const Graph perturbed = apply_perturbations(g, r.perturbations);
    const auto clean_h = homophily_distribution(g, acfg.weighting);
    const auto perturbed_h = homophily_distribution(perturbed, acfg.weighting);
    r.homophily_distance = distribution_distance(clean_h, perturbed_h, acfg.measure);
    r.homophily_histogram = paired_histogram(clean_h, perturbed_h);

    const ParamSet init =
        init_params(cfg.model, g.feature_dim(), g.num_classes(), cfg.learning_rate, derive_seed(seed, stream::init));
    TrainConfig tc = cfg.training;
    tc.seed = seed;
    const TrainResult clean = train_distributed(g, part, init, tc);
    const TrainResult attacked =
        train_distributed(g, part, init, tc, PoisonSpec{acfg.poisoned_worker, r.perturbations});

    r.clean_accuracy = evaluate(clean.params, g, g.test_nodes());
    r.attacked_accuracy = evaluate(attacked.params, g, g.test_nodes());
    r.accuracy_drop = r.clean_accuracy - r.attacked_accuracy;
    r.target_clean_accuracy = evaluate(clean.params, g, r.targets);
    r.target_attacked_accuracy = evaluate(attacked.params, g, r.targets);

    if (cfg.workers >= 2) {
      r.divergence = gradient_norm_divergence(attacked.records, acfg.poisoned_worker);
      r.control_divergence = gradient_norm_divergence(clean.records, acfg.poisoned_worker);
      r.poisoned_above_fraction = positive_fraction(r.divergence, tc.poison_start_epoch);
    }
    r.clean_records = clean.records;
    r.attacked_records = attacked.records;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("seed " + std::to_string(seed) + ": " + e.what());
  }
  r.wall_seconds = seconds_since(start);
  return r;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<RunResult> results(cfg.seeds.size());
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(cfg.parallel_seeds, cfg.seeds.size()));
  if (threads <= 1) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) results[s] = run_seed(cfg, cfg.seeds[s]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < cfg.seeds.size(); s = next++) {
        try {
          results[s] = run_seed(cfg, cfg.seeds[s]);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

nlohmann::json to_json(const RunResult& r) {
  return {{"seed", r.seed},
          {"clean_accuracy", r.clean_accuracy},
          {"attacked_accuracy", r.attacked_accuracy},
          {"accuracy_drop", r.accuracy_drop},
          {"target_clean_accuracy", r.target_clean_accuracy},
          {"target_attacked_accuracy", r.target_attacked_accuracy},
          {"divergence", r.divergence},
          {"control_divergence", r.control_divergence},
          {"poisoned_above_fraction", r.poisoned_above_fraction},
          {"homophily_distance", r.homophily_distance},
          {"attack_seconds", r.attack_seconds},
          {"wall_seconds", r.wall_seconds},
          {"edges_removed", r.edges_removed},
          {"edges_added", r.edges_added},
          {"features_flipped", r.features_flipped},
          {"edge_budget", r.edge_budget},
          {"num_nodes", r.num_nodes},
          {"num_edges", r.num_edges},
          {"targets", r.targets}};
}

RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult r;
  j.at("seed").get_to(r.seed);
  j.at("clean_accuracy").get_to(r.clean_accuracy);
  j.at("attacked_accuracy").get_to(r.attacked_accuracy);
  j.at("accuracy_drop").get_to(r.accuracy_drop);
  j.at("target_clean_accuracy").get_to(r.target_clean_accuracy);
  j.at("target_attacked_accuracy").get_to(r.target_attacked_accuracy);
  j.at("divergence").get_to(r.divergence);
  j.at("control_divergence").get_to(r.control_divergence);
  j.at("poisoned_above_fraction").get_to(r.poisoned_above_fraction);
  j.at("homophily_distance").get_to(r.homophily_distance);
  j.at("attack_seconds").get_to(r.attack_seconds);
  j.at("wall_seconds").get_to(r.wall_seconds);
  j.at("edges_removed").get_to(r.edges_removed);
  j.at("edges_added").get_to(r.edges_added);
  j.at("features_flipped").get_to(r.features_flipped);
  j.at("edge_budget").get_to(r.edge_budget);
  j.at("num_nodes").get_to(r.num_nodes);
  j.at("num_edges").get_to(r.num_edges);
  j.at("targets").get_to(r.targets);
  return r;
}

}  // namespace disttack
