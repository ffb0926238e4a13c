#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "disttack/graph/graph_io.hpp"
#include "disttack/graph/partition.hpp"
#include "disttack/graph/subgraph.hpp"
#include "helpers.hpp"

using namespace disttack;
using namespace disttack::testing;

TEST_CASE("build symmetrizes a single edge") {
  const Graph g = plain_graph(2, {{0, 1}});
  CHECK(g.num_edges() == 1);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  const CsrMatrix a = g.adjacency();
  CHECK(a.nnz() == 2);
  CHECK(a.at(0, 1) == 1.0);
  CHECK(a.at(1, 0) == 1.0);
}

TEST_CASE("build deduplicates and drops self-loops") {
  const Graph g = plain_graph(3, {{0, 1}, {1, 0}, {2, 2}});
  CHECK(g.num_edges() == 1);
  CHECK(g.dropped_self_loops() == 1);
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.degree(2) == 0);
}

TEST_CASE("build rejects invalid input") {
  CHECK_THROWS_AS(plain_graph(3, {{0, 5}}), InvalidArgument);
  CHECK_THROWS_AS(Graph::build(0, {}, zeros(0, 2), {}, {}), InvalidArgument);
  SplitLists twice;
  twice.train = {0};
  twice.test = {0};
  CHECK_THROWS_AS(Graph::build(2, {}, zeros(2, 2), {0, 1}, twice), InvalidArgument);
  CHECK_THROWS_AS(Graph::build(2, {}, zeros(3, 2), {0, 1}, {}), InvalidArgument);
  CHECK_THROWS_AS(Graph::build(2, {}, zeros(2, 2), {0}, {}), InvalidArgument);
}

TEST_CASE("graph invariants hold on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(seed, 24, 0.2, 3, 3, true);
    const CsrMatrix a = g.adjacency();
    CHECK(a.is_symmetric());
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      CHECK(a.find(i, i) == CsrMatrix::npos);
      const auto cols = a.row_cols(i);
      CHECK(std::is_sorted(cols.begin(), cols.end()));
    }
    std::set<NodeId> seen;
    for (auto* split : {&g.train_nodes(), &g.val_nodes(), &g.test_nodes()}) {
      for (NodeId i : *split) CHECK(seen.insert(i).second);
    }
  }
}

TEST_CASE("normalize_adjacency small cases") {
  SUBCASE("single node") {
    const Graph g = plain_graph(1, {});
    const auto adj = normalize_adjacency(g);
    CHECK(adj.matrix.nnz() == 1);
    CHECK(adj.matrix.at(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("one edge") {
    const auto adj = normalize_adjacency(plain_graph(2, {{0, 1}}));
    for (NodeId i = 0; i < 2; ++i) {
      for (NodeId j = 0; j < 2; ++j) CHECK(adj.matrix.at(i, j) == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK(adj.degree == std::vector<double>{2.0, 2.0});
  }
  SUBCASE("star center") {
    const auto adj = normalize_adjacency(star_graph(4));
    CHECK(adj.matrix.at(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(adj.degree[0] == 5.0);
  }
}

TEST_CASE("normalize_adjacency matches dense construction") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = random_graph(seed, 4 + seed % 29, 0.25);
    const auto adj = normalize_adjacency(g);
    const Matrix dense = dense_normalized(g);
    const Matrix sparse = adj.matrix.to_dense();
    CHECK((dense - sparse).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(adj.matrix.is_symmetric(1e-15));
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      CHECK(adj.matrix.find(i, i) != CsrMatrix::npos);
      for (NodeId j = 0; j < g.num_nodes(); ++j) {
        CHECK((sparse(i, j) > 0.0) == (i == j || g.has_edge(i, j)));
      }
    }
  }
}

TEST_CASE("remove and restore edges") {
  Graph g = path_graph(4);
  CHECK(g.remove_edge(2, 1));
  CHECK_FALSE(g.has_edge(1, 2));
  CHECK_FALSE(g.remove_edge(1, 2));
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(1) == 1);
  CHECK(g.tombstones() == 2);
  CHECK(g.restore_edge(1, 2));
  CHECK(g.same_as(path_graph(4)));
  g.remove_edge(0, 1);
  g.compact();
  CHECK(g.tombstones() == 0);
  CHECK(g.edge_list() == std::vector<Edge>{{1, 2}, {2, 3}});
  g.add_edges(std::vector<Edge>{{0, 3}, {3, 0}, {1, 1}});
  CHECK(g.has_edge(0, 3));
  CHECK(g.num_edges() == 3);
}

TEST_CASE("partition_nodes") {
  const Graph g8 = plain_graph(8, {});
  SUBCASE("round robin") {
    const Partition p = partition_nodes(g8, 4);
    for (int w = 0; w < 4; ++w) {
      CHECK(p.members(w) == std::vector<NodeId>{static_cast<NodeId>(w), static_cast<NodeId>(w + 4)});
    }
  }
  SUBCASE("single worker") {
    const Partition p = partition_nodes(g8, 1, PartitionStrategy::hash);
    CHECK(p.members(0).size() == 8);
  }
  SUBCASE("cross edges on a path") {
    CHECK(count_cross_edges(path_graph(4), partition_nodes(path_graph(4), 2)) == 3);
  }
  SUBCASE("invalid count") {
    CHECK_THROWS_AS(partition_nodes(g8, 0), InvalidArgument);
    CHECK_THROWS_AS(partition_nodes(g8, -1), InvalidArgument);
  }
  SUBCASE("totality for every strategy") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Graph g = random_graph(seed, 30 + seed, 0.1);
      for (auto s : {PartitionStrategy::round_robin, PartitionStrategy::hash, PartitionStrategy::random}) {
        const int n = 1 + static_cast<int>(seed % 5);
        const Partition p = partition_nodes(g, n, s, seed);
        REQUIRE(p.assignment.size() == g.num_nodes());
        std::size_t total = 0;
        for (int w = 0; w < n; ++w) total += p.members(w).size();
        CHECK(total == g.num_nodes());
        for (int a : p.assignment) CHECK((a >= 0 && a < n));
      }
    }
  }
  SUBCASE("random strategy is balanced and seeded") {
    const Graph g = plain_graph(10, {});
    const Partition a = partition_nodes(g, 3, PartitionStrategy::random, 7);
    CHECK(a.assignment == partition_nodes(g, 3, PartitionStrategy::random, 7).assignment);
    for (int w = 0; w < 3; ++w) CHECK((a.members(w).size() == 3 || a.members(w).size() == 4));
  }
}

TEST_CASE("sample_1hop examples") {
  SUBCASE("isolated target") {
    const Subgraph s = sample_1hop(plain_graph(3, {{1, 2}}), 0);
    CHECK(s.global_ids == std::vector<NodeId>{0});
    CHECK(s.local.num_edges() == 0);
  }
  SUBCASE("star center") {
    const Subgraph s = sample_1hop(star_graph(4), 0);
    CHECK(s.size() == 5);
    CHECK(s.local.num_edges() == 4);
  }
  SUBCASE("path interior") {
    const Subgraph s = sample_1hop(path_graph(4), 1);
    CHECK(s.global_ids == std::vector<NodeId>{1, 0, 2});
    CHECK(s.local.num_edges() == 2);
    CHECK(s.local.has_edge(s.to_local(1), s.to_local(0)));
    CHECK(s.local.has_edge(s.to_local(1), s.to_local(2)));
    CHECK_FALSE(s.contains(3));
  }
  SUBCASE("invalid target") { CHECK_THROWS(sample_1hop(path_graph(4), 9)); }
}

TEST_CASE("sample_1hop covers exactly the closed neighborhood with induced edges") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = random_graph(seed, 20, 0.2);
    const NodeId t = static_cast<NodeId>(seed % g.num_nodes());
    if (seed % 2 == 1 && g.degree(t) > 0) g.remove_edge(t, g.neighbors(t).front());
    const Subgraph s = sample_1hop(g, t);
    std::set<NodeId> expect{t};
    for (NodeId j = 0; j < g.num_nodes(); ++j) {
      if (g.has_edge(t, j)) expect.insert(j);
    }
    CHECK(std::set<NodeId>(s.global_ids.begin(), s.global_ids.end()) == expect);
    CHECK(s.global_ids.front() == t);
    for (NodeId a = 0; a < s.size(); ++a) {
      CHECK(s.local.features().row(a) == g.features().row(s.to_global(a)));
      CHECK(s.local.label(a) == g.label(s.to_global(a)));
      for (NodeId b = 0; b < s.size(); ++b) {
        CHECK(s.local.has_edge(a, b) == g.has_edge(s.to_global(a), s.to_global(b)));
      }
    }
  }
}

TEST_CASE("sample_1hop over several targets puts targets first") {
  const Graph g = path_graph(6);
  const std::vector<NodeId> targets{4, 1};
  const Subgraph s = sample_1hop(g, targets);
  CHECK(s.num_targets == 2);
  CHECK(s.global_ids == std::vector<NodeId>{4, 1, 0, 2, 3, 5});
}

TEST_CASE("generate_sbm") {
  SbmParams p;
  p.block_sizes = {3, 3};
  p.p_intra = 1.0;
  p.p_inter = 0.0;
  p.feature_dim = 2;
  const Graph cliques = generate_sbm(1, p);
  CHECK(cliques.num_edges() == 6);
  for (const Edge& e : cliques.edge_list()) CHECK(cliques.label(e.u) == cliques.label(e.v));

  p.p_intra = 0.0;
  CHECK(generate_sbm(1, p).num_edges() == 0);

  const Graph a = small_sbm(9);
  const Graph b = small_sbm(9);
  CHECK(a.edge_list() == b.edge_list());
  CHECK(a.same_as(b));
  CHECK_FALSE(a.same_as(small_sbm(10)));

  p.p_inter = 1.5;
  CHECK_THROWS_AS(generate_sbm(1, p), InvalidArgument);
  p.p_inter = -0.1;
  CHECK_THROWS_AS(generate_sbm(1, p), InvalidArgument);
  p.p_inter = 0.0;
  p.block_sizes = {};
  CHECK_THROWS(generate_sbm(1, p));
}

TEST_CASE("graph files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "disttack_graph_io";
  std::filesystem::create_directories(dir);
  const Graph g = small_sbm(3);
  write_edge_list(g, dir / "edges.tsv");
  write_node_table(g, dir / "nodes.csv");
  write_splits(g, dir / "splits.json");
  const Graph back = load_graph(dir / "edges.tsv", dir / "nodes.csv", dir / "splits.json");
  CHECK(back.same_as(g));
  CHECK(back.labels() == g.labels());
  CHECK(back.train_nodes() == g.train_nodes());
  CHECK(back.test_nodes() == g.test_nodes());

  std::ofstream(dir / "bad.tsv") << "# comment\n0\t1\n\n2 x\n";
  CHECK_THROWS_AS(read_edge_list(dir / "bad.tsv"), IoError);
  std::ofstream(dir / "ok.tsv") << "# comment\n0\t1\n\n1\t2\n";
  CHECK(read_edge_list(dir / "ok.tsv").size() == 2);
  CHECK_THROWS_AS(read_edge_list(dir / "missing.tsv"), IoError);
}
