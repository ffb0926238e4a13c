#include "disttack/exp/results.hpp"

#include <fstream>

#include "disttack/dist/telemetry.hpp"

#ifndef DISTTACK_VERSION
#define DISTTACK_VERSION "unknown"
#endif

namespace disttack {

namespace fs = std::filesystem;

std::string code_version() { return DISTTACK_VERSION; }

nlohmann::json summary_json(const ExperimentConfig& cfg, std::span<const RunResult> results) {
  nlohmann::json runs = nlohmann::json::array();
  for (const RunResult& r : results) runs.push_back(to_json(r));
  return {{"code_version", code_version()}, {"config", to_json(cfg)}, {"runs", runs}};
}

Summary summary_from_json(const nlohmann::json& j) {
  Summary s;
  try {
    j.at("code_version").get_to(s.code_version);
    s.config = j.at("config");
    for (const auto& r : j.at("runs")) s.runs.push_back(run_result_from_json(r));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed summary: ") + e.what());
  }
  return s;
}

Summary load_summary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return summary_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void emit_results(const ExperimentConfig& cfg, std::span<const RunResult> results, const fs::path& out_dir,
                  bool force) {
  std::error_code ec;
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
    throw IoError(out_dir.string() + " is not empty; pass --force to overwrite");
  }
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  for (const RunResult& r : results) {
    const fs::path dir = out_dir / ("seed" + std::to_string(r.seed));
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const std::optional<int> poisoned = cfg.attack_cfg.poisoned_worker;
    write_gradient_csv(r.clean_records, std::nullopt, dir / "gradients_clean.csv");
    write_gradient_csv(r.attacked_records, poisoned, dir / "gradients_attacked.csv");
    write_divergence_csv(r.divergence, dir / "divergence.csv");
    write_histogram_csv(r.homophily_histogram, dir / "homophily_hist.csv");
    write_perturbation_json(r.perturbations, dir / "perturbation.json");
  }

  const fs::path summary = out_dir / "summary.json";
  std::ofstream out(summary);
  if (!out) throw IoError("cannot write " + summary.string());
  out << summary_json(cfg, results).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + summary.string());
}

}  // namespace disttack
