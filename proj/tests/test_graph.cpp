#include "doctest.h"

#include <vector>

#include "sparsity/graph.hpp"

using namespace sparsity;

namespace {

Graph path_graph(std::size_t n, std::size_t d = 2) {
  std::vector<Endpoints> e;
  for (VertexId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, d, e);
}

Graph triangle() {
  const std::vector<Endpoints> e{{0, 1}, {1, 2}, {2, 0}};
  return Graph(3, 2, e);
}

}  // namespace

TEST_CASE("build_graph assigns ports in insertion order") {
  const std::vector<Endpoints> one{{0, 1}};
  Graph g(2, 3, one);
  CHECK(g.ports_of(0, 0) == std::vector<Port>{1});
  CHECK(g.ports_of(1, 0) == std::vector<Port>{1});

  const std::vector<Endpoints> two{{0, 1}, {1, 2}};
  Graph h(3, 3, two);
  CHECK(h.ports_of(1, 0) == std::vector<Port>{1});
  CHECK(h.ports_of(1, 1) == std::vector<Port>{2});
}

TEST_CASE("build_graph rejects degree overflow and bad endpoints") {
  const std::vector<Endpoints> parallel{{0, 1}, {0, 1}};
  try {
    Graph g(2, 1, parallel);
    FAIL("expected DegreeExceeded");
  } catch (const DegreeExceeded& ex) {
    CHECK(ex.vertex == 0);
  }
  const std::vector<Endpoints> bad{{0, 5}};
  CHECK_THROWS_AS(Graph(2, 3, bad), BadEndpoint);
}

TEST_CASE("self-loops take two ports and parallel edges are allowed") {
  const std::vector<Endpoints> e{{0, 0}, {0, 1}, {0, 1}};
  Graph g(2, 4, e);
  CHECK(g.degree(0) == 4);
  CHECK(g.ports_of(0, 0) == std::vector<Port>{1, 2});
  CHECK(g.at_port(0, 3)->edge == 1);
  CHECK(g.at_port(0, 4)->edge == 2);
  const std::vector<Endpoints> tight_loop{{0, 0}};
  CHECK_THROWS_AS(Graph(1, 1, tight_loop), DegreeExceeded);
}

TEST_CASE("oracle counts every answered query including empty ones") {
  const std::vector<Endpoints> one{{0, 1}};
  Graph g(2, 3, one);
  OracleHandle h(g);
  auto a = h.query(0, 1);
  REQUIRE(a.has_value());
  CHECK(a->neighbor == 1);
  CHECK_FALSE(h.query(0, 2).has_value());
  CHECK(h.query_count() == 2);
  CHECK(h.query(0, 1) == a);
  CHECK(h.query_count() == 3);
  CHECK_THROWS_AS(h.query(0, 4), BadEndpoint);
  CHECK_THROWS_AS(h.query(2, 1), BadEndpoint);
  CHECK(h.query_count() == 3);
}

TEST_CASE("explore_ball on a triangle") {
  Graph g = triangle();
  OracleHandle h(g);
  const auto b0 = explore_ball(h, EdgeRef{0, 0, 1}, 0);
  CHECK(b0.vertices.size() == 2);
  CHECK(b0.edges.size() == 1);
  const auto b1 = explore_ball(h, EdgeRef{0, 0, 1}, 1);
  CHECK(b1.vertices.size() == 3);
  CHECK(b1.edges.size() == 3);
  CHECK(h.query_count() == b0.queries_spent + b1.queries_spent);
}

TEST_CASE("explore_ball on a path, middle edge, radius 2") {
  Graph g = path_graph(10);
  OracleHandle h(g);
  const EdgeRef mid{4, 4, 5};
  const auto ball = explore_ball(h, mid, 2);
  // Hand BFS: vertices 2..7 and the five edges among them.
  CHECK(ball.vertices == std::vector<VertexId>{2, 3, 4, 5, 6, 7});
  CHECK(ball.edges.size() == 5);
  CHECK(ball.queries_spent <= 2 * 2 * 2 * 2);
  CHECK(h.query_count() == ball.queries_spent);
  CHECK(ball.contains_vertex(7));
  CHECK_FALSE(ball.contains_vertex(8));
}

TEST_CASE("balls are monotone in the radius and within the query bound") {
  Graph g = path_graph(30, 3);
  for (std::size_t r = 0; r < 6; ++r) {
    OracleHandle h(g);
    const auto small = explore_ball(h, EdgeRef{10, 10, 11}, r);
    const auto big = explore_ball(h, EdgeRef{10, 10, 11}, r + 1);
    for (VertexId v : small.vertices) CHECK(big.contains_vertex(v));
    std::size_t bound = 2;
    for (std::size_t i = 0; i <= r; ++i) bound *= 3;
    CHECK(small.queries_spent <= bound);
  }
}

TEST_CASE("read_graph parses, reports line numbers and round-trips") {
  Graph g = read_graph("2 3\n0 1\n");
  CHECK(g.n() == 2);
  CHECK(g.d() == 3);
  CHECK(g.m() == 1);

  const std::string canonical = "4 4\n0 1\n1 2\n2 3\n3 0\n1 1\n";
  CHECK(write_graph(read_graph(canonical)) == canonical);

  Graph c = read_graph("# comment\n3 2\n\n0 1\n# mid\n1 2\n");
  CHECK(c.m() == 2);

  try {
    read_graph("2 1\n0 1\n0 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line == 3);
  }
  CHECK_THROWS_AS(read_graph("2 3\n0 x\n"), ParseError);
  CHECK_THROWS_AS(read_graph("2 3\n0 2\n"), ParseError);
  CHECK_THROWS_AS(read_graph("2 3\n0 1 2\n"), ParseError);
  CHECK_THROWS_AS(read_graph(""), ParseError);
}

TEST_CASE("induced and edge subgraphs") {
  Graph g = triangle();
  const std::vector<VertexId> keep{2, 0};
  Graph h = g.induced(keep);
  CHECK(h.n() == 2);
  REQUIRE(h.m() == 1);
  CHECK(h.edge(0) == Endpoints{0, 1});
  const std::vector<EdgeId> ids{0, 2};
  CHECK(g.edge_subgraph(ids).m() == 2);
}
