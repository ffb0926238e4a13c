#pragma once

#include <filesystem>
#include <vector>

#include "disttack/graph/graph.hpp"

namespace disttack {

// Edge list: one `src<TAB>dst` pair per line; blank lines and '#' comments skipped.
std::vector<Edge> read_edge_list(const std::filesystem::path& path);

struct NodeTable {
  Matrix features;
  std::vector<int> labels;
};

// CSV with header `node_id,f0,...,f{d-1},label`; rows may come in any order
// but every id in [0, rows) must appear exactly once.
NodeTable read_node_table(const std::filesystem::path& path);

// JSON object {"train": [...], "val": [...], "test": [...]}.
SplitLists read_splits(const std::filesystem::path& path);

Graph load_graph(const std::filesystem::path& edges, const std::filesystem::path& nodes,
                 const std::filesystem::path& splits);

void write_edge_list(const Graph& g, const std::filesystem::path& path);
void write_node_table(const Graph& g, const std::filesystem::path& path);
void write_splits(const Graph& g, const std::filesystem::path& path);

}  // namespace disttack
