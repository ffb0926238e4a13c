#include "disttack/attack/perturbation.hpp"

#include <fstream>
#include <string>

namespace disttack {

Graph apply_perturbations(const Graph& g, const PerturbationSet& p) {
  Graph out = g;
  for (const auto& e : p.edges_removed) {
    if (!out.remove_edge(e.i, e.j)) {
      throw InvalidArgument("perturbation removes missing edge (" + std::to_string(e.i) + ", " +
                            std::to_string(e.j) + ")");
    }
  }
  if (!p.edges_added.empty()) {
    std::vector<Edge> add;
    for (const auto& e : p.edges_added) {
      if (e.i == e.j || out.has_edge(e.i, e.j)) {
        throw InvalidArgument("perturbation adds existing edge (" + std::to_string(e.i) + ", " +
                              std::to_string(e.j) + ")");
      }
      add.push_back({e.i, e.j});
    }
    out.add_edges(add);
  }
  out.compact();
  Matrix& x = out.mutable_features();
  for (const auto& f : p.features_flipped) {
    out.check_node(f.node);
    if (f.dim >= out.feature_dim()) throw InvalidArgument("perturbation flips feature dim out of range");
    x(f.node, static_cast<Eigen::Index>(f.dim)) = f.new_value;
  }
  return out;
}

nlohmann::json to_json(const PerturbationSet& p) {
  using nlohmann::json;
  auto edges = [](const std::vector<EdgeChange>& v) {
    json arr = json::array();
    for (const auto& e : v) arr.push_back({{"i", e.i}, {"j", e.j}, {"score", e.score}, {"iter", e.iter}});
    return arr;
  };
  json flips = json::array();
  for (const auto& f : p.features_flipped) {
    flips.push_back({{"node", f.node},
                     {"dim", f.dim},
                     {"old", f.old_value},
                     {"new", f.new_value},
                     {"sign", f.sign},
                     {"iter", f.iter}});
  }
  return json{{"edges_removed", edges(p.edges_removed)},
              {"edges_added", edges(p.edges_added)},
              {"features_flipped", std::move(flips)},
              {"homophily_penalties", p.homophily_penalties},
              {"config", p.config}};
}

PerturbationSet perturbation_from_json(const nlohmann::json& j) {
  PerturbationSet p;
  try {
    auto edges = [](const nlohmann::json& arr) {
      std::vector<EdgeChange> v;
      for (const auto& e : arr) {
        v.push_back({e.at("i").get<NodeId>(), e.at("j").get<NodeId>(), e.at("score").get<double>(),
                     e.at("iter").get<int>()});
      }
      return v;
    };
    p.edges_removed = edges(j.at("edges_removed"));
    if (j.contains("edges_added")) p.edges_added = edges(j.at("edges_added"));
    for (const auto& f : j.at("features_flipped")) {
      p.features_flipped.push_back({f.at("node").get<NodeId>(), f.at("dim").get<std::size_t>(),
                                    f.at("old").get<double>(), f.at("new").get<double>(), f.at("sign").get<int>(),
                                    f.at("iter").get<int>()});
    }
    if (j.contains("homophily_penalties")) p.homophily_penalties = j.at("homophily_penalties").get<std::vector<double>>();
    if (j.contains("config")) p.config = j.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed perturbation set: ") + e.what());
  }
  return p;
}

void write_perturbation_json(const PerturbationSet& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(p).dump(2) << '\n';
}

PerturbationSet read_perturbation_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return perturbation_from_json(j);
}

}  // namespace disttack
