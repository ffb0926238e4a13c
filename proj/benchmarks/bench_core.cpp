#include <benchmark/benchmark.h>

#include <numeric>

#include "disttack/attack/attack.hpp"
#include "disttack/gnn/model.hpp"
#include "disttack/graph/sbm.hpp"

using namespace disttack;

namespace {

// Four-block SBM with `scale` * 50 nodes per block.
Graph bench_graph(std::int64_t scale) {
  SbmParams p;
  p.block_sizes.assign(4, static_cast<std::size_t>(50 * scale));
  p.p_intra = 0.1 / static_cast<double>(scale);
  p.p_inter = 0.01 / static_cast<double>(scale);
  p.feature_dim = 16;
  return generate_sbm(0, p);
}

ParamSet bench_params(const Graph& g) {
  return init_params({ModelKind::gcn, 16, 2}, g.feature_dim(), g.num_classes(), 0.2, 0);
}

void BM_NormalizeAdjacency(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(normalize_adjacency(g));
  state.counters["nodes"] = static_cast<double>(g.num_nodes());
}

void BM_GcnForward(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  const ParamSet theta = bench_params(g);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  for (auto _ : state) benchmark::DoNotOptimize(gcn_forward(theta, adj, g.features()));
  state.counters["nodes"] = static_cast<double>(g.num_nodes());
}

void BM_GcnBackward(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  const ParamSet theta = bench_params(g);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  for (auto _ : state) benchmark::DoNotOptimize(backward(theta, adj, g.features(), g.labels(), g.train_nodes()));
  state.counters["nodes"] = static_cast<double>(g.num_nodes());
}

void BM_AttackBackward(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  const ParamSet theta = bench_params(g);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const std::vector<NodeId> targets(g.train_nodes().begin(), g.train_nodes().begin() + 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(attack_backward(theta, adj, g.features(), g.labels(), targets,
                                             {.want_adjacency = true, .want_features = true}));
  }
}

// One Disttack iteration with a pre-trained surrogate (surrogate_epochs = 0
// keeps the timing on gradients, scoring and selection).
void BM_DisttackIteration(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  const Partition part = partition_nodes(g, 4);
  AttackConfig cfg;
  cfg.edge_budget = 4;
  cfg.feature_budget = 4;
  cfg.iterations = 1;
  cfg.surrogate_epochs = 0;
  const std::vector<NodeId> targets = select_targets(g, part, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_disttack(g, part, cfg, targets));
  state.counters["edges"] = static_cast<double>(g.num_edges());
}

void BM_HomophilyDistribution(benchmark::State& state) {
  const Graph g = bench_graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(homophily_distribution(g));
}

}  // namespace

BENCHMARK(BM_NormalizeAdjacency)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK(BM_GcnForward)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK(BM_GcnBackward)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK(BM_AttackBackward)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK(BM_DisttackIteration)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK(BM_HomophilyDistribution)->RangeMultiplier(2)->Range(1, 8);
BENCHMARK_MAIN();
