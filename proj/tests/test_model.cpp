#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "mrfselect/types.hpp"

using namespace mrfselect;

TEST_CASE("ProblemDims validates its fields") {
  CHECK_THROWS_AS(ProblemDims(0, 2), Error);
  CHECK_THROWS_AS(ProblemDims(3, 1), Error);
  CHECK(ProblemDims(3, 2).edge_slots() == 3);
  CHECK(ProblemDims(5, 2).edge_slots() == 10);
}

TEST_CASE("complete graph") {
  CHECK(Graph::complete(ProblemDims(1, 2)).edge_count() == 0);

  const Graph g3 = Graph::complete(ProblemDims(3, 2));
  CHECK(g3.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  const Graph g5 = Graph::complete(ProblemDims(5, 2));
  CHECK(g5.edge_count() == 10);
  for (int v = 0; v < 5; ++v) CHECK(g5.degree(v) == 4);
}

TEST_CASE("graph symmetry and no self loops survive random flips") {
  std::mt19937_64 rng(7);
  Graph g = Graph::empty(ProblemDims(6, 2));
  std::uniform_int_distribution<int> vert(0, 5);
  for (int step = 0; step < 200; ++step) {
    int u = vert(rng), v = vert(rng);
    if (u == v) continue;
    g = g.with_edge_flipped(u, v);
    int twice_edges = 0;
    for (int a = 0; a < 6; ++a) {
      CHECK_FALSE(g.has_edge(a, a));
      twice_edges += g.degree(a);
      for (int b = 0; b < 6; ++b) CHECK(g.has_edge(a, b) == g.has_edge(b, a));
    }
    CHECK(g.edge_count() * 2 == twice_edges);
  }
}

TEST_CASE("edge mask round trip") {
  const ProblemDims dims(5, 2);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> mask(0, (1ull << dims.edge_slots()) - 1);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t m = mask(rng);
    CHECK(Graph::from_edge_mask(dims, m).edge_mask() == m);
  }
}

TEST_CASE("encode_config basic examples") {
  // Vertices are 1-indexed in the examples below, 0-indexed in code.
  const ProblemDims bin(2, 2);
  CHECK(encode_config({0}, {0}, bin).code == 0);
  CHECK(encode_config({1, 1}, {0, 1}, bin).code == 3);

  // W={2,5,7} (1-indexed), a=(2,0,1), |A|=3: positional expansion.
  const ProblemDims dims(8, 3);
  const ConfigKey key = encode_config({2, 0, 1}, {1, 4, 6}, dims);
  CHECK(key.margin == std::vector<int>{1, 4, 6});
  CHECK(key.code == 2 + 0 * 3 + 1 * 9);
}

TEST_CASE("encode_config is a bijection over A^|W|") {
  const ProblemDims dims(8, 3);
  const std::vector<int> w{1, 4, 6};
  std::set<std::uint64_t> seen;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const ConfigKey key = encode_config({a, b, c}, w, dims);
        CHECK(key.code < 27);
        seen.insert(key.code);
        CHECK(decode_config(key, dims) == std::vector<int>{a, b, c});
      }
  CHECK(seen.size() == 27);
}

TEST_CASE("encode_config order independence and errors") {
  const ProblemDims dims(8, 3);
  CHECK(encode_config({2, 0, 1}, {1, 4, 6}, dims) == encode_config({1, 0, 2}, {6, 4, 1}, dims));
  CHECK_THROWS_AS(encode_config({3}, {0}, dims), InvalidSymbol);
  CHECK_THROWS_AS(encode_config({0, 1}, {2, 2}, dims), InvalidMargin);
}

TEST_CASE("enumerate_graphs counts and ordering") {
  CHECK(enumerate_graphs(ProblemDims(2, 2)).size() == 2);
  CHECK(enumerate_graphs(ProblemDims(3, 2)).size() == 8);

  const auto graphs = enumerate_graphs(ProblemDims(4, 2));
  REQUIRE(graphs.size() == 64);
  CHECK(graphs.front() == Graph::empty(ProblemDims(4, 2)));
  CHECK(graphs.back() == Graph::complete(ProblemDims(4, 2)));
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(graphs[i].edge_mask() == i);
    for (std::size_t j = i + 1; j < graphs.size(); ++j) CHECK_FALSE(graphs[i] == graphs[j]);
  }
}

TEST_CASE("enumerate_graphs respects the cap") {
  CHECK_THROWS_AS(graph_space_size(ProblemDims(10, 2)), EnumerationTooLarge);  // 45 slots
  CHECK(graph_space_size(ProblemDims(5, 2)) == 1024);
}

TEST_CASE("graph containment") {
  const ProblemDims dims(4, 2);
  const Graph chain = Graph::empty(dims).with_edge(0, 1).with_edge(1, 2);
  CHECK(Graph::complete(dims).contains(chain));
  CHECK(chain.contains(Graph::empty(dims)));
  CHECK_FALSE(chain.contains(Graph::empty(dims).with_edge(0, 3)));
}
