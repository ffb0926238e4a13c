// disttack: run experiments, scaling benchmarks, attack replays and gradient checks.
//
// Exit codes: 0 success, 2 configuration error, 1 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "disttack/attack/perturbation.hpp"
#include "disttack/exp/bench.hpp"
#include "disttack/exp/config.hpp"
#include "disttack/exp/results.hpp"
#include "disttack/exp/runner.hpp"
#include "disttack/gnn/gradcheck.hpp"

namespace {

using namespace disttack;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "JSON experiment config (defaults apply when omitted)");
  cmd->add_option("--set", args.overrides, "Override a config field, e.g. --set attack.lambda_homo=0")
      ->take_all();
}

void print_runs(const std::vector<RunResult>& runs) {
  std::printf("%-6s %8s %8s %8s %8s %8s %8s\n", "seed", "clean", "attacked", "drop", "removed", "flipped", "W1");
  double drop = 0.0;
  for (const RunResult& r : runs) {
    std::printf("%-6llu %8.4f %8.4f %8.4f %8zu %8zu %8.4f\n", static_cast<unsigned long long>(r.seed),
                r.clean_accuracy, r.attacked_accuracy, r.accuracy_drop, r.edges_removed + r.edges_added,
                r.features_flipped, r.homophily_distance);
    drop += r.accuracy_drop;
  }
  if (!runs.empty()) std::printf("mean drop %.4f over %zu seeds\n", drop / static_cast<double>(runs.size()), runs.size());
}

int cmd_run(const CommonArgs& common, const std::string& out, bool force, int parallel) {
  ExperimentConfig cfg = load_experiment_config(common.config, common.overrides);
  if (!out.empty()) cfg.output_dir = out;
  if (parallel > 0) cfg.parallel_seeds = parallel;
  const auto runs = run_experiment(cfg);
  emit_results(cfg, runs, cfg.output_dir, force);
  print_runs(runs);
  std::printf("results written to %s\n", cfg.output_dir.string().c_str());
  return 0;
}

int cmd_replay(const CommonArgs& common, const std::string& perturbation, const std::string& out, bool force) {
  ExperimentConfig cfg = load_experiment_config(common.config, common.overrides);
  if (!out.empty()) cfg.output_dir = out;
  const PerturbationSet pset = read_perturbation_json(perturbation);
  std::vector<RunResult> runs;
  for (std::uint64_t seed : cfg.seeds) runs.push_back(run_seed(cfg, seed, &pset));
  emit_results(cfg, runs, cfg.output_dir, force);
  print_runs(runs);
  return 0;
}

int cmd_bench(const CommonArgs& common, const std::vector<double>& multipliers, const std::string& axis,
              int repeats, const std::string& out) {
  const ExperimentConfig cfg = load_experiment_config(common.config, common.overrides);
  BenchOptions opts;
  opts.axis = parse_bench_axis(axis);
  opts.repeats = repeats;
  const BenchResult b = scaling_benchmark(cfg, multipliers, opts);
  std::printf("%6s %7s %8s %7s %5s %9s %9s %12s %12s\n", "mult", "N", "|A|", "d", "M", "N_sub", "|A_sub|",
              "complexity", "seconds");
  for (const BenchRow& r : b.rows) {
    std::printf("%6.2f %7zu %8zu %7.2f %5zu %9.1f %9.1f %12.4g %12.4g\n", r.multiplier, r.nodes, r.edges,
                r.avg_degree, r.feature_dim, r.sub_nodes, r.sub_edges, r.complexity, r.seconds);
  }
  std::printf("fit: seconds = %.4g + %.4g * complexity, R^2 = %.4f\n", b.fit.intercept, b.fit.slope, b.fit.r2);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw IoError("cannot write " + out);
    f << to_json(b).dump(2) << '\n';
  }
  return 0;
}

int cmd_gradcheck(const GradCheckOptions& opts, const std::string& loss, double tolerance) {
  GradCheckOptions o = opts;
  if (loss == "attack") {
    o.loss = CheckedLoss::attack;
  } else if (loss != "mean_ce") {
    throw ConfigError("loss", "expected 'mean_ce' or 'attack'");
  }
  const GradCheckReport report = run_gradcheck(o);
  std::printf("%-4s %12s %12s %8s %8s\n", "", "max_rel", "max_abs", "checked", "skipped");
  for (const auto& g : report.groups) {
    std::printf("%-4s %12.3e %12.3e %8zu %8zu\n", g.name.c_str(), g.max_rel_error, g.max_abs_error, g.checked,
                g.skipped);
  }
  const bool ok = report.max_rel_error() < tolerance;
  std::printf("max relative error %.3e (tolerance %.1e): %s\n", report.max_rel_error(), tolerance,
              ok ? "ok" : "FAILED");
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisoning attacks on simulated distributed GNN training"};
  app.set_version_flag("--version", disttack::code_version());
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_out;
  bool run_force = false;
  int parallel = 0;
  auto* run = app.add_subcommand("run", "Run paired clean/attacked training for every seed");
  add_common(run, run_args);
  run->add_option("-o,--out", run_out, "Output directory (overrides output_dir)");
  run->add_flag("--force", run_force, "Write into a non-empty output directory");
  run->add_option("--parallel-seeds", parallel, "Run this many seeds concurrently");

  CommonArgs bench_args;
  std::vector<double> multipliers{1, 2, 4, 8};
  std::string axis = "size";
  int repeats = 3;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time attack iterations on growing SBM graphs");
  add_common(bench, bench_args);
  bench->add_option("-m,--multipliers", multipliers, "Scale factors")->delimiter(',')->capture_default_str();
  bench->add_option("--axis", axis, "What to scale: size or features")->capture_default_str();
  bench->add_option("--repeats", repeats, "Attack runs per size")->capture_default_str();
  bench->add_option("-o,--out", bench_out, "Write the table and fit as JSON");

  CommonArgs replay_args;
  std::string perturbation, replay_out;
  bool replay_force = false;
  auto* replay = app.add_subcommand("replay", "Train against a stored perturbation set");
  add_common(replay, replay_args);
  replay->add_option("-p,--perturbation", perturbation, "Perturbation JSON")->required();
  replay->add_option("-o,--out", replay_out, "Output directory (overrides output_dir)");
  replay->add_flag("--force", replay_force, "Write into a non-empty output directory");

  disttack::GradCheckOptions gc;
  std::string loss = "mean_ce";
  double tolerance = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--seed", gc.seed)->capture_default_str();
  gradcheck->add_option("--nodes", gc.nodes)->capture_default_str();
  gradcheck->add_option("--hidden", gc.hidden)->capture_default_str();
  gradcheck->add_option("--features", gc.feature_dim)->capture_default_str();
  gradcheck->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gradcheck->add_option("--loss", loss, "mean_ce or attack")->capture_default_str();
  gradcheck->add_option("--tolerance", tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args, run_out, run_force, parallel);
    if (*bench) return cmd_bench(bench_args, multipliers, axis, repeats, bench_out);
    if (*replay) return cmd_replay(replay_args, perturbation, replay_out, replay_force);
    if (*gradcheck) return cmd_gradcheck(gc, loss, tolerance);
  } catch (const disttack::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
