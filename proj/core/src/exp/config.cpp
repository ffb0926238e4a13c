#include "disttack/exp/config.hpp"

#include <cmath>
#include <fstream>

namespace disttack {

AttackMethod parse_attack_method(std::string_view name) {
  if (name == "none") return AttackMethod::none;
  if (name == "disttack") return AttackMethod::disttack;
  if (name == "random" || name == "ra") return AttackMethod::random;
  if (name == "dice") return AttackMethod::dice;
  throw InvalidArgument("unknown attack method '" + std::string(name) + "'");
}

std::string_view to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::none: return "none";
    case AttackMethod::disttack: return "disttack";
    case AttackMethod::random: return "random";
    case AttackMethod::dice: return "dice";
  }
  return "unknown";
}

namespace {

using nlohmann::json;

// Runs `fn` on j[key] if present, turning parse failures into ConfigError.
template <class F>
void field(const json& j, const std::string& section, const std::string& key, F&& fn) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  const std::string name = section.empty() ? key : section + "." + key;
  try {
    fn(*it);
  } catch (const json::exception& e) {
    throw ConfigError(name, e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(name, e.what());
  }
}

void reject_unknown(const json& j, const std::string& section, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ConfigError(section.empty() ? "config" : section, "must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
  }
}

DatasetSpec parse_dataset(const json& j) {
  DatasetSpec d;
  std::string type = "sbm";
  field(j, "dataset", "type", [&](const json& v) { type = v.get<std::string>(); });
  if (type == "sbm") {
    reject_unknown(j, "dataset",
                   {"type", "block_sizes", "p_intra", "p_inter", "feature_dim", "noise", "train_fraction",
                    "val_fraction"});
    auto& s = d.sbm;
    field(j, "dataset", "block_sizes", [&](const json& v) { s.block_sizes = v.get<std::vector<std::size_t>>(); });
    field(j, "dataset", "p_intra", [&](const json& v) { s.p_intra = v.get<double>(); });
    field(j, "dataset", "p_inter", [&](const json& v) { s.p_inter = v.get<double>(); });
    field(j, "dataset", "feature_dim", [&](const json& v) { s.feature_dim = v.get<std::size_t>(); });
    field(j, "dataset", "noise", [&](const json& v) { s.noise = v.get<double>(); });
    field(j, "dataset", "train_fraction", [&](const json& v) { s.train_fraction = v.get<double>(); });
    field(j, "dataset", "val_fraction", [&](const json& v) { s.val_fraction = v.get<double>(); });
  } else if (type == "files") {
    reject_unknown(j, "dataset", {"type", "edges", "nodes", "splits"});
    d.kind = DatasetSpec::Kind::files;
    field(j, "dataset", "edges", [&](const json& v) { d.edges = v.get<std::string>(); });
    field(j, "dataset", "nodes", [&](const json& v) { d.nodes = v.get<std::string>(); });
    field(j, "dataset", "splits", [&](const json& v) { d.splits = v.get<std::string>(); });
  } else {
    throw ConfigError("dataset.type", "expected 'sbm' or 'files', got '" + type + "'");
  }
  return d;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j, "", {"dataset", "model", "training", "attack", "seeds", "output_dir", "parallel_seeds"});
  ExperimentConfig cfg;
  field(j, "", "dataset", [&](const json& v) { cfg.dataset = parse_dataset(v); });

  field(j, "", "model", [&](const json& m) {
    reject_unknown(m, "model", {"kind", "hidden", "sgc_steps", "learning_rate"});
    field(m, "model", "kind", [&](const json& v) { cfg.model.kind = parse_model_kind(v.get<std::string>()); });
    field(m, "model", "hidden", [&](const json& v) { cfg.model.hidden = v.get<std::size_t>(); });
    field(m, "model", "sgc_steps", [&](const json& v) { cfg.model.sgc_steps = v.get<int>(); });
    field(m, "model", "learning_rate", [&](const json& v) { cfg.learning_rate = v.get<double>(); });
  });

  field(j, "", "training", [&](const json& t) {
    reject_unknown(t, "training",
                   {"workers", "partition", "epochs", "batch_size", "aggregation", "threads", "poison_start_epoch",
                    "record_wall_time"});
    auto& tc = cfg.training;
    field(t, "training", "workers", [&](const json& v) { cfg.workers = v.get<int>(); });
    field(t, "training", "partition",
          [&](const json& v) { cfg.partition = parse_partition_strategy(v.get<std::string>()); });
    field(t, "training", "epochs", [&](const json& v) { tc.epochs = v.get<int>(); });
    field(t, "training", "batch_size", [&](const json& v) { tc.batch_size = v.get<std::size_t>(); });
    field(t, "training", "aggregation", [&](const json& v) { tc.aggregation = parse_aggregation(v.get<std::string>()); });
    field(t, "training", "threads", [&](const json& v) { tc.threads = v.get<int>(); });
    field(t, "training", "poison_start_epoch", [&](const json& v) { tc.poison_start_epoch = v.get<int>(); });
    field(t, "training", "record_wall_time", [&](const json& v) { tc.record_wall_time = v.get<bool>(); });
  });

  field(j, "", "attack", [&](const json& a) {
    if (!a.is_object()) throw ConfigError("attack", "must be an object");
    json rest = a;
    field(a, "attack", "method", [&](const json& v) { cfg.attack = parse_attack_method(v.get<std::string>()); });
    field(a, "attack", "edge_budget_fraction", [&](const json& v) { cfg.edge_budget_fraction = v.get<double>(); });
    rest.erase("method");
    rest.erase("edge_budget_fraction");
    cfg.attack_cfg = attack_config_from_json(rest);
  });

  field(j, "", "seeds", [&](const json& v) { cfg.seeds = v.get<std::vector<std::uint64_t>>(); });
  field(j, "", "output_dir", [&](const json& v) { cfg.output_dir = v.get<std::string>(); });
  field(j, "", "parallel_seeds", [&](const json& v) { cfg.parallel_seeds = v.get<int>(); });
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json dataset;
  if (cfg.dataset.kind == DatasetSpec::Kind::sbm) {
    const auto& s = cfg.dataset.sbm;
    dataset = {{"type", "sbm"},
               {"block_sizes", s.block_sizes},
               {"p_intra", s.p_intra},
               {"p_inter", s.p_inter},
               {"feature_dim", s.feature_dim},
               {"noise", s.noise},
               {"train_fraction", s.train_fraction},
               {"val_fraction", s.val_fraction}};
  } else {
    dataset = {{"type", "files"},
               {"edges", cfg.dataset.edges.string()},
               {"nodes", cfg.dataset.nodes.string()},
               {"splits", cfg.dataset.splits.string()}};
  }
  json attack = to_json(cfg.attack_cfg);
  attack.erase("seed");
  attack["method"] = std::string(to_string(cfg.attack));
  if (cfg.edge_budget_fraction) attack["edge_budget_fraction"] = *cfg.edge_budget_fraction;
  const auto& t = cfg.training;
  return {{"dataset", dataset},
          {"model",
           {{"kind", std::string(to_string(cfg.model.kind))},
            {"hidden", cfg.model.hidden},
            {"sgc_steps", cfg.model.sgc_steps},
            {"learning_rate", cfg.learning_rate}}},
          {"training",
           {{"workers", cfg.workers},
            {"partition", std::string(to_string(cfg.partition))},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"aggregation", std::string(to_string(t.aggregation))},
            {"threads", t.threads},
            {"poison_start_epoch", t.poison_start_epoch},
            {"record_wall_time", t.record_wall_time}}},
          {"attack", attack},
          {"seeds", cfg.seeds},
          {"output_dir", cfg.output_dir.string()},
          {"parallel_seeds", cfg.parallel_seeds}};
}

void validate(const ExperimentConfig& cfg) {
  const auto& d = cfg.dataset;
  if (d.kind == DatasetSpec::Kind::sbm) {
    const auto& s = d.sbm;
    if (s.block_sizes.empty()) throw ConfigError("dataset.block_sizes", "must be nonempty");
    for (std::size_t b : s.block_sizes) {
      if (b == 0) throw ConfigError("dataset.block_sizes", "block sizes must be positive");
    }
    if (!(s.p_intra >= 0.0 && s.p_intra <= 1.0)) throw ConfigError("dataset.p_intra", "must lie in [0, 1]");
    if (!(s.p_inter >= 0.0 && s.p_inter <= 1.0)) throw ConfigError("dataset.p_inter", "must lie in [0, 1]");
    if (s.feature_dim < s.block_sizes.size()) {
      throw ConfigError("dataset.feature_dim", "must be at least the number of blocks");
    }
    if (!(s.noise >= 0.0) || !std::isfinite(s.noise)) throw ConfigError("dataset.noise", "must be finite and >= 0");
    if (!(s.train_fraction > 0.0 && s.val_fraction >= 0.0 && s.train_fraction + s.val_fraction < 1.0)) {
      throw ConfigError("dataset.train_fraction", "fractions must satisfy train > 0, val >= 0, train + val < 1");
    }
  } else {
    if (d.edges.empty()) throw ConfigError("dataset.edges", "path required");
    if (d.nodes.empty()) throw ConfigError("dataset.nodes", "path required");
    if (d.splits.empty()) throw ConfigError("dataset.splits", "path required");
  }
  if (cfg.model.hidden == 0) throw ConfigError("model.hidden", "must be >= 1");
  if (cfg.model.sgc_steps < 1) throw ConfigError("model.sgc_steps", "must be >= 1");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("model.learning_rate", "must be finite and > 0");
  }
  if (cfg.workers < 1) throw ConfigError("training.workers", "must be >= 1");
  if (cfg.training.epochs < 0) throw ConfigError("training.epochs", "must be >= 0");
  if (cfg.training.batch_size < 1) throw ConfigError("training.batch_size", "must be >= 1");
  if (cfg.training.threads < 1) throw ConfigError("training.threads", "must be >= 1");
  if (cfg.training.poison_start_epoch < 0) throw ConfigError("training.poison_start_epoch", "must be >= 0");
  if (cfg.attack_cfg.poisoned_worker < 0 || cfg.attack_cfg.poisoned_worker >= cfg.workers) {
    throw ConfigError("attack.poisoned_worker", "must name one of the workers");
  }
  if (cfg.edge_budget_fraction && !(*cfg.edge_budget_fraction >= 0.0 && *cfg.edge_budget_fraction <= 1.0)) {
    throw ConfigError("attack.edge_budget_fraction", "must lie in [0, 1]");
  }
  try {
    validate(cfg.attack_cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("attack", e.what());
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds", "at least one seed required");
  if (cfg.parallel_seeds < 1) throw ConfigError("parallel_seeds", "must be >= 1");
}

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (!node->is_object()) throw ConfigError(key, "cannot descend into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    try {
      j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", path.string() + ": " + e.what());
    }
  }
  for (const std::string& o : overrides) apply_override(j, o);
  return experiment_config_from_json(j);
}

}  // namespace disttack
