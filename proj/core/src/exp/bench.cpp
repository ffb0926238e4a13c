#include "disttack/exp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disttack/attack/attack.hpp"
#include "disttack/graph/sbm.hpp"

namespace disttack {

BenchAxis parse_bench_axis(std::string_view name) {
  if (name == "size") return BenchAxis::size;
  if (name == "features") return BenchAxis::features;
  throw InvalidArgument("unknown bench axis '" + std::string(name) + "'");
}

std::string_view to_string(BenchAxis a) { return a == BenchAxis::size ? "size" : "features"; }

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_linear needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_linear: x has no spread");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

nlohmann::json to_json(const BenchResult& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchRow& r : b.rows) {
    rows.push_back({{"multiplier", r.multiplier},
                    {"nodes", r.nodes},
                    {"edges", r.edges},
                    {"avg_degree", r.avg_degree},
                    {"feature_dim", r.feature_dim},
                    {"sub_nodes", r.sub_nodes},
                    {"sub_edges", r.sub_edges},
                    {"complexity", r.complexity},
                    {"seconds", r.seconds},
                    {"surrogate_seconds", r.surrogate_seconds}});
  }
  return {{"rows", rows},
          {"fit", {{"intercept", b.fit.intercept}, {"slope", b.fit.slope}, {"r2", b.fit.r2}}}};
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BenchResult scaling_benchmark(const ExperimentConfig& base, std::span<const double> multipliers,
                              const BenchOptions& opts) {
  if (multipliers.size() < 3) throw InvalidArgument("scaling benchmark needs at least 3 sizes");
  if (base.dataset.kind != DatasetSpec::Kind::sbm) throw InvalidArgument("scaling benchmark needs an SBM dataset");
  if (opts.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  const std::uint64_t seed = base.seeds.empty() ? 0 : base.seeds.front();

  BenchResult out;
  for (double mult : multipliers) {
    if (!(mult > 0.0)) throw InvalidArgument("multipliers must be positive");
    SbmParams params = base.dataset.sbm;
    if (opts.axis == BenchAxis::size) {
      for (auto& b : params.block_sizes) {
        b = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(b) * mult)));
      }
    } else {
      params.feature_dim = std::max<std::size_t>(
          params.block_sizes.size(), static_cast<std::size_t>(std::llround(static_cast<double>(params.feature_dim) * mult)));
    }
    const Graph g = generate_sbm(seed, params);
    const Partition part = partition_nodes(g, base.workers, base.partition, seed);
    AttackConfig acfg = base.attack_cfg;
    acfg.seed = seed;
    if (base.edge_budget_fraction) {
      acfg.edge_budget =
          static_cast<std::size_t>(std::llround(*base.edge_budget_fraction * static_cast<double>(g.num_edges())));
    }
    if (acfg.edge_budget == 0 && acfg.feature_budget == 0) {
      throw InvalidArgument("scaling benchmark needs a nonzero attack budget");
    }
    const auto targets = select_targets(g, part, acfg);

    std::vector<double> perturb, surrogate;
    double sub_nodes = 0.0, sub_edges = 0.0;
    std::size_t iters = 0;
    for (int rep = 0; rep < opts.repeats; ++rep) {
      AttackTrace trace;
      run_disttack(g, part, acfg, targets, &trace);
      for (const auto& it : trace.iterations) {
        perturb.push_back(it.perturb_seconds);
        surrogate.push_back(it.surrogate_seconds);
        sub_nodes += static_cast<double>(it.subgraph_nodes);
        sub_edges += static_cast<double>(it.subgraph_edges);
        ++iters;
      }
    }
    if (iters == 0) throw Error("attack ran no iterations at multiplier " + std::to_string(mult));

    BenchRow row;
    row.multiplier = mult;
    row.nodes = g.num_nodes();
    row.edges = g.num_edges();
    row.avg_degree = g.average_degree();
    row.feature_dim = g.feature_dim();
    row.sub_nodes = sub_nodes / static_cast<double>(iters);
    row.sub_edges = sub_edges / static_cast<double>(iters);
    row.complexity = row.sub_nodes * (row.sub_edges * row.avg_degree + static_cast<double>(row.feature_dim));
    row.seconds = median(perturb);
    row.surrogate_seconds = median(surrogate);
    out.rows.push_back(row);
  }

  std::vector<double> x, y;
  for (const BenchRow& r : out.rows) {
    x.push_back(r.complexity);
    y.push_back(r.seconds);
  }
  out.fit = fit_linear(x, y);
  return out;
}

}  // namespace disttack
