#include "doctest.h"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "sparsity/local_explorer.hpp"

using namespace sparsity;

namespace {

Graph make(std::size_t n, std::size_t d, std::vector<Endpoints> e) { return Graph(n, d, e); }

EdgeRef ref(const Graph& g, EdgeId e) { return {e, g.edge(e).u, g.edge(e).v}; }

std::vector<EdgeId> members(std::uint32_t mask) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < 32; ++e) {
    if (mask >> e & 1U) out.push_back(e);
  }
  return out;
}

/// Expected small_circuits / component from the full circuit list.
struct Reference {
  std::vector<std::uint32_t> circuits;
  std::size_t t;

  [[nodiscard]] std::uint32_t small_union(EdgeId e) const {
    std::uint32_t s = 1U << e;
    for (std::uint32_t c : circuits) {
      if ((c >> e & 1U) && static_cast<std::size_t>(std::popcount(c)) < t) s |= c;
    }
    return s;
  }
  [[nodiscard]] bool small_large(EdgeId e) const { return static_cast<std::size_t>(std::popcount(small_union(e))) >= t; }

  /// Closure; returns nullopt for Large.
  [[nodiscard]] std::optional<std::uint32_t> component(EdgeId e) const {
    std::uint32_t s = 1U << e;
    std::uint32_t done = 0;
    while (s & ~done) {
      const EdgeId f = static_cast<EdgeId>(std::countr_zero(s & ~done));
      done |= 1U << f;
      if (small_large(f)) return std::nullopt;
      s |= small_union(f);
      if (static_cast<std::size_t>(std::popcount(s)) >= t) return std::nullopt;
    }
    return s;
  }
};

/// True iff the matroid restricted to `mask` is connected (every pair shares a circuit chain).
bool connected_set(const std::vector<std::uint32_t>& circuits, std::uint32_t mask) {
  if (std::popcount(mask) <= 1) return true;
  std::uint32_t reach = 1U << std::countr_zero(mask);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::uint32_t c : circuits) {
      if ((c & ~mask) == 0 && (c & reach) && (c & ~reach)) {
        reach |= c;
        grew = true;
      }
    }
  }
  return reach == mask;
}

}  // namespace

TEST_CASE("small_circuits examples") {
  const Graph forest = make(4, 3, {{0, 1}, {1, 2}, {1, 3}});
  OracleHandle hf(forest);
  auto s = small_circuits(hf, ref(forest, 0), SparsityParams{1, 1}, 5);
  CHECK_FALSE(s.large);
  CHECK(s.edges == std::vector<EdgeId>{0});

  const Graph tri = make(3, 2, {{0, 1}, {1, 2}, {2, 0}});
  OracleHandle ht(tri);
  s = small_circuits(ht, ref(tri, 0), SparsityParams{1, 1}, 5);
  CHECK(s.edges == std::vector<EdgeId>{0, 1, 2});

  std::vector<Endpoints> cyc;
  for (VertexId i = 0; i < 10; ++i) cyc.push_back({i, (i + 1) % 10});
  const Graph c10 = make(10, 2, cyc);
  OracleHandle hc(c10);
  s = small_circuits(hc, ref(c10, 0), SparsityParams{1, 1}, 5);
  CHECK_FALSE(s.large);
  CHECK(s.edges == std::vector<EdgeId>{0});
}

TEST_CASE("component examples") {
  const Graph forest = make(4, 3, {{0, 1}, {1, 2}, {1, 3}});
  OracleHandle hf(forest);
  CHECK(component(hf, ref(forest, 1), SparsityParams{1, 1}, 5).edges == std::vector<EdgeId>{1});

  // Two triangles sharing edge 0 = (0,1).
  const Graph bowtie = make(4, 3, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 0}});
  OracleHandle hb(bowtie);
  const auto c = component(hb, ref(bowtie, 1), SparsityParams{1, 1}, 10);
  CHECK_FALSE(c.large);
  CHECK(c.edges == std::vector<EdgeId>{0, 1, 2, 3, 4});

  // K4 under (2,3): its only circuit has 6 edges, so it is small only when t > 6.
  const Graph k4 = make(4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  OracleHandle hk(k4);
  CHECK(component(hk, ref(k4, 0), SparsityParams{2, 3}, 4).edges == std::vector<EdgeId>{0});
  CHECK(component(hk, ref(k4, 0), SparsityParams{2, 3}, 7).edges.size() == 6);

  // Two K4s sharing an edge: 11 edges connected through 6-edge circuits.
  const Graph twin = make(6, 5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {0, 4}, {0, 5}, {1, 4}, {1, 5}, {4, 5}});
  OracleHandle htw(twin);
  CHECK(component(htw, ref(twin, 0), SparsityParams{2, 3}, 7).large);
  CHECK(component(htw, ref(twin, 2), SparsityParams{2, 3}, 7).large);
  CHECK(component(htw, ref(twin, 2), SparsityParams{2, 3}, 12).edges.size() == 11);
}

TEST_CASE("enumerate_small_circuits examples") {
  const Graph tri = make(3, 2, {{0, 1}, {1, 2}, {2, 0}});
  OracleHandle ht(tri);
  const auto ball = explore_ball(ht, ref(tri, 0), 5);
  const auto cs = enumerate_small_circuits(ball, ref(tri, 0), SparsityParams{1, 1}, 5);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].size() == 3);

  const Graph path = make(3, 2, {{0, 1}, {1, 2}});
  OracleHandle hp(path);
  for (auto p : {SparsityParams{1, 1}, SparsityParams{1, 0}, SparsityParams{2, 3}}) {
    CHECK(enumerate_small_circuits(explore_ball(hp, ref(path, 0), 5), ref(path, 0), p, 5).empty());
  }

  const Graph k4 = make(4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  OracleHandle hk(k4);
  const auto kc = enumerate_small_circuits(explore_ball(hk, ref(k4, 0), 7), ref(k4, 0), SparsityParams{2, 3}, 7);
  REQUIRE(kc.size() == 1);
  CHECK(kc[0].size() == 6);
}

TEST_CASE("circuit enumeration is exhaustive on random graphs") {
  std::mt19937_64 rng(21);
  const std::vector<SparsityParams> params{{1, 0}, {1, 1}, {2, 0}, {2, 2}, {2, 3}, {3, 4}};
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 3 + rng() % 5;
    Graph g = oracle::random_graph(n, 4 + rng() % 9, 5, rng);
    const auto edges = oracle::edge_list(g);
    OracleHandle h(g);
    for (auto p : params) {
      const auto circuits = oracle::circuits(edges, p.k, p.l);
      for (std::size_t t : {3, 5, 8, 13}) {
        for (EdgeId e = 0; e < g.m(); ++e) {
          std::set<std::vector<EdgeId>> expect;
          for (std::uint32_t c : circuits) {
            if ((c >> e & 1U) && static_cast<std::size_t>(std::popcount(c)) < t) expect.insert(members(c));
          }
          const auto ball = explore_ball(h, ref(g, e), t);
          const auto got = enumerate_small_circuits(ball, ref(g, e), p, t);
          CHECK(std::set<std::vector<EdgeId>>(got.begin(), got.end()) == expect);
        }
      }
    }
  }
}

TEST_CASE("small_circuits and component agree with the brute-force closure") {
  std::mt19937_64 rng(22);
  const std::vector<SparsityParams> params{{1, 0}, {1, 1}, {2, 0}, {2, 2}, {2, 3}};
  for (int trial = 0; trial < 80; ++trial) {
    Graph g = oracle::random_graph(4 + rng() % 5, 5 + rng() % 10, 5, rng);
    const auto edges = oracle::edge_list(g);
    for (auto p : params) {
      const auto circuits = oracle::circuits(edges, p.k, p.l);
      for (std::size_t t : {3, 6, 9}) {
        const Reference want{circuits, t};
        OracleHandle h(g);
        ExploreOptions opts;
        opts.vertex_sets = trial % 2 == 0;
        Explorer ex(h, p, t, opts);
        for (EdgeId e = 0; e < g.m(); ++e) {
          const auto s = ex.small_circuits(ref(g, e));
          CHECK(s.large == want.small_large(e));
          if (!s.large) CHECK(s.edges == members(want.small_union(e)));

          const auto c = ex.component(ref(g, e));
          const auto expect = want.component(e);
          CHECK(c->large == !expect.has_value());
          if (!c->large) {
            CHECK(c->edges == members(*expect));
            std::uint32_t mask = 0;
            for (EdgeId f : c->edges) mask |= 1U << f;
            // Connected and small.
            CHECK(connected_set(circuits, mask));
            CHECK(c->edges.size() < t);
            // Maximal among small connected sets meeting it.
            for (std::uint32_t x = 1; x < (1U << g.m()); ++x) {
              if ((x & mask) == 0 || (x & ~mask) == 0) continue;
              if (static_cast<std::size_t>(std::popcount(x)) >= t) continue;
              CHECK_FALSE(connected_set(circuits, x));
            }
            // Every member reports the same component.
            for (EdgeId f : c->edges) {
              OracleHandle h2(g);
              const auto cf = component(h2, ref(g, f), p, t);
              CHECK_FALSE(cf.large);
              CHECK(cf.edges == c->edges);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("component does not depend on worklist order") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = oracle::random_graph(10, 18, 4, rng);
    for (auto p : {SparsityParams{1, 1}, SparsityParams{2, 2}}) {
      for (EdgeId e = 0; e < g.m(); ++e) {
        OracleHandle h(g);
        const auto base = component(h, ref(g, e), p, 7);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
          OracleHandle h2(g);
          Explorer ex(h2, p, 7);
          ex.set_worklist_seed(seed);
          const auto c = ex.component(ref(g, e));
          CHECK(c->large == base.large);
          CHECK(c->edges == base.edges);
        }
      }
    }
  }
}

TEST_CASE("queries stay inside the 3t neighbourhood") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = oracle::random_graph(120, 150, 3, rng);
    // Distances from every vertex (the graph is small).
    for (EdgeId e = 0; e < g.m(); e += 7) {
      std::vector<std::size_t> dist(g.n(), SIZE_MAX);
      std::deque<VertexId> q;
      for (VertexId s : {g.edge(e).u, g.edge(e).v}) {
        dist[s] = 0;
        q.push_back(s);
      }
      while (!q.empty()) {
        const VertexId x = q.front();
        q.pop_front();
        for (const auto& inc : g.incidences(x)) {
          if (dist[inc.neighbor] == SIZE_MAX) {
            dist[inc.neighbor] = dist[x] + 1;
            q.push_back(inc.neighbor);
          }
        }
      }
      const std::size_t t = 4;
      OracleHandle h(g);
      std::vector<VertexId> trace;
      h.set_trace(&trace);
      component(h, ref(g, e), SparsityParams{1, 1}, t);
      for (VertexId v : trace) CHECK(dist[v] <= 3 * t);
    }
  }
}

TEST_CASE("search budget is enforced") {
  std::mt19937_64 rng(25);
  Graph g = oracle::random_graph(40, 80, 4, rng);
  OracleHandle h(g);
  ExploreOptions tiny;
  tiny.node_budget = 1;
  CHECK_THROWS_AS(small_circuits(h, ref(g, 0), SparsityParams{1, 0}, 40, tiny), SearchBudgetExceeded);
}
