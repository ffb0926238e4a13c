#include "disttack/graph/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace disttack {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view tok, const std::filesystem::path& path, std::size_t line) {
  tok = trim(tok);
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  }
  return value;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto tab = s.find('\t');
    if (tab == std::string_view::npos) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected src<TAB>dst");
    }
    edges.push_back({parse_number<NodeId>(s.substr(0, tab), path, lineno),
                     parse_number<NodeId>(s.substr(tab + 1), path, lineno)});
  }
  return edges;
}

NodeTable read_node_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty node table");
  const auto header = split_on(trim(line), ',');
  if (header.size() < 2 || trim(header.front()) != "node_id" || trim(header.back()) != "label") {
    throw IoError(path.string() + ": header must be node_id,f0,...,label");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t d = 0; d < dim; ++d) {
    if (trim(header[d + 1]) != "f" + std::to_string(d)) {
      throw IoError(path.string() + ": feature column " + std::to_string(d) + " must be named f" + std::to_string(d));
    }
  }

  struct Row {
    NodeId id;
    std::vector<double> f;
    int label;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_on(trim(line), ',');
    if (cells.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                    " columns");
    }
    Row r{parse_number<NodeId>(cells[0], path, lineno), std::vector<double>(dim), 0};
    for (std::size_t d = 0; d < dim; ++d) r.f[d] = parse_number<double>(cells[d + 1], path, lineno);
    r.label = parse_number<int>(cells.back(), path, lineno);
    rows.push_back(std::move(r));
  }

  NodeTable table;
  table.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  table.labels.assign(rows.size(), -1);
  std::vector<bool> seen(rows.size(), false);
  for (const Row& r : rows) {
    if (r.id >= rows.size() || seen[r.id]) {
      throw IoError(path.string() + ": node ids must be a permutation of 0.." + std::to_string(rows.size() - 1));
    }
    seen[r.id] = true;
    for (std::size_t d = 0; d < dim; ++d) table.features(r.id, static_cast<Eigen::Index>(d)) = r.f[d];
    table.labels[r.id] = r.label;
  }
  return table;
}

SplitLists read_splits(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
    SplitLists s;
    s.train = j.at("train").get<std::vector<NodeId>>();
    s.val = j.value("val", std::vector<NodeId>{});
    s.test = j.at("test").get<std::vector<NodeId>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Graph load_graph(const std::filesystem::path& edges, const std::filesystem::path& nodes,
                 const std::filesystem::path& splits) {
  auto table = read_node_table(nodes);
  const auto edge_list = read_edge_list(edges);
  const auto split_lists = read_splits(splits);
  const std::size_t n = table.labels.size();
  return Graph::build(n, edge_list, std::move(table.features), std::move(table.labels), split_lists);
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "# " << g.num_nodes() << " nodes, " << g.num_edges() << " undirected edges\n";
  for (const Edge& e : g.edge_list()) out << e.u << '\t' << e.v << '\n';
}

void write_node_table(const Graph& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "node_id";
  for (std::size_t d = 0; d < g.feature_dim(); ++d) out << ",f" << d;
  out << ",label\n";
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    out << i;
    for (double x : g.feature_row(i)) out << ',' << x;
    out << ',' << g.label(i) << '\n';
  }
}

void write_splits(const Graph& g, const std::filesystem::path& path) {
  auto out = open_out(path);
  nlohmann::json j{{"train", g.train_nodes()}, {"val", g.val_nodes()}, {"test", g.test_nodes()}};
  out << j.dump(2) << '\n';
}

}  // namespace disttack
