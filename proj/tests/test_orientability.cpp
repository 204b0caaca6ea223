#include "doctest.h"

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sparsity/orientability.hpp"
#include "sparsity/pebble.hpp"

using namespace sparsity;

namespace {

Graph make(std::size_t n, std::size_t d, std::vector<Endpoints> e) { return Graph(n, d, e); }

Graph cycle(std::size_t n) {
  std::vector<Endpoints> e;
  for (VertexId v = 0; v < n; ++v) e.push_back({v, static_cast<VertexId>((v + 1) % n)});
  return Graph(n, 2, e);
}

Graph complete(std::size_t n) {
  std::vector<Endpoints> e;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) e.push_back({u, v});
  }
  return Graph(n, n - 1, e);
}

Graph triangles(std::size_t copies, std::size_t d = 3) {
  std::vector<Endpoints> e;
  for (VertexId c = 0; c < copies; ++c) {
    e.push_back({3 * c, 3 * c + 1});
    e.push_back({3 * c + 1, 3 * c + 2});
    e.push_back({3 * c, 3 * c + 2});
  }
  return Graph(3 * copies, d, e);
}

std::vector<VertexId> members(std::uint32_t mask) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < 32; ++v) {
    if ((mask >> v) & 1U) out.push_back(v);
  }
  return out;
}

/// g straight from its definition, with eta_{k,0} of G[X] by partition enumeration.
long g_oracle(const Graph& g, std::uint32_t mask, int k, int l) {
  const auto xs = members(mask);
  std::vector<int> local(g.n(), -1);
  for (std::size_t i = 0; i < xs.size(); ++i) local[xs[i]] = static_cast<int>(i);
  std::vector<Endpoints> inner;
  long cut = 0;
  for (const auto& [u, v] : g.edges()) {
    const bool a = local[u] >= 0;
    const bool b = local[v] >= 0;
    if (a != b) ++cut;
    if (a && b) inner.push_back({static_cast<VertexId>(local[u]), static_cast<VertexId>(local[v])});
  }
  return k + l - cut + oracle::eta(xs.size(), inner, k, 0);
}

/// Maximum over sub-partitions into non-empty proper subsets, by direct recursion.
long xi_oracle(const Graph& g, int k, int l) {
  const std::uint32_t full = (1U << g.n()) - 1;
  std::vector<long> gv(full + 1, 0);
  for (std::uint32_t x = 1; x < full; ++x) gv[x] = g_oracle(g, x, k, l);
  auto rec = [&](auto&& self, std::uint32_t left) -> long {
    if (left == 0) return 0;
    const std::uint32_t low = left & (~left + 1);
    long best = self(self, left ^ low);  // lowest vertex uncovered
    for (std::uint32_t x = left; x; x = (x - 1) & left) {
      if ((x & low) && x != full) best = std::max(best, gv[x] + self(self, left ^ x));
    }
    return best;
  };
  return rec(rec, full);
}

}  // namespace

TEST_CASE("g examples") {
  const Graph single = make(3, 2, {{0, 1}});
  CHECK(g_deficiency(single, std::vector<VertexId>{2}, 1, 1).g_value == 2);
  CHECK(g_deficiency(single, std::vector<VertexId>{2}, 1, 1).deficient());
  CHECK(g_deficiency(single, std::vector<VertexId>{0}, 1, 0).g_value == 0);
  const Graph two = triangles(2);
  CHECK(g_deficiency(two, std::vector<VertexId>{0, 1, 2}, 1, 1).g_value == 2);
  CHECK_THROWS_AS(g_deficiency(two, std::vector<VertexId>{}, 1, 1), EmptySet);
}

TEST_CASE("g agrees with its definition and is supermodular") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + rng() % 7;
    const Graph g = oracle::random_graph(n, rng() % (2 * n), 4, rng);
    const int k = 1 + static_cast<int>(rng() % 2);
    const int l = static_cast<int>(rng() % 3);
    const std::uint32_t full = (1U << n) - 1;
    for (int pair = 0; pair < 10; ++pair) {
      const std::uint32_t x = 1 + static_cast<std::uint32_t>(rng() % full);
      const std::uint32_t y = 1 + static_cast<std::uint32_t>(rng() % full);
      CHECK(g_deficiency(g, members(x), k, l).g_value == g_oracle(g, x, k, l));
      if ((x & y) == 0) continue;
      const long lhs = g_oracle(g, x, k, l) + g_oracle(g, y, k, l);
      const long rhs = g_oracle(g, x & y, k, l) + g_oracle(g, x | y, k, l);
      CHECK(lhs <= rhs);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("eta examples") {
  CHECK(eta_kl_exact(cycle(4), 1, 1).value == 0);
  const Graph p3 = make(3, 2, {{0, 1}, {1, 2}});
  CHECK(eta_kl_exact(p3, 1, 1).value == 1);
  CHECK(eta_kl_dp(p3, 1, 1).value == 1);
  CHECK_THROWS_AS(eta_kl_exact(cycle(12), 1, 1), TooLarge);
}

TEST_CASE("eta: brute force, subset DP and the partition oracle agree; Eq relation holds") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const Graph g = oracle::random_graph(n, rng() % (2 * n + 1), 4, rng);
    const auto edges = oracle::edge_list(g);
    for (int k = 1; k <= 3; ++k) {
      const long e0 = oracle::eta(n, edges, k, 0);
      for (int l = 0; l <= 2 * k - 1; ++l) {
        const auto brute = eta_kl_exact(g, k, l);
        const auto dp = eta_kl_dp(g, k, l);
        const long expect = n == 1 && l > 0 ? 0 : oracle::eta(n, edges, k, l);
        CHECK(brute.value == expect);
        CHECK(dp.value == expect);
        CHECK(e0 <= expect);
        CHECK(expect <= e0 + l);
        // The witness reproduces the value.
        if (expect > 0) {
          const int blocks = *std::max_element(dp.block_of.begin(), dp.block_of.end()) + 1;
          CHECK(k * (blocks - 1L) + l - oracle::crossing(edges, dp.block_of) == expect);
        }
      }
    }
  }
}

TEST_CASE("tree-packing identity on connected graphs") {
  std::mt19937_64 rng(31);
  int done = 0;
  while (done < 80) {
    const std::size_t n = 2 + rng() % 7;
    const Graph g = oracle::random_graph(n, n - 1 + rng() % (n + 2), 5, rng);
    if (eta_kl_dp(g, 1, 0).value != 0) continue;  // disconnected
    const int k = 1 + static_cast<int>(rng() % 3);
    CHECK(static_cast<long>(rank(g, {k, k})) == k * (static_cast<long>(n) - 1) - oracle::eta(n, oracle::edge_list(g), k, 0));
    ++done;
  }
}

TEST_CASE("approx_eta_kl examples") {
  SUBCASE("graph with a spanning tree") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Graph g = cycle(300);
      OracleHandle h(g);
      CHECK(approx_eta_kl(h, 1, 0, 0.1, seed) <= 0);
    }
  }
  SUBCASE("isolated vertices") {
    const Graph g(1000, 2, std::vector<Endpoints>{});
    OracleHandle h(g);
    const long r = approx_eta_kl(h, 1, 0, 0.1, 3);
    CHECK(r >= 999 - 100);
    CHECK(r <= 999);
  }
  SUBCASE("never above the exact value on small instances") {
    std::mt19937_64 rng(2);
    int below = 0;
    int total = 0;
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 4 + rng() % 5;
      const Graph g = oracle::random_graph(n, rng() % (2 * n), 3, rng);
      for (int l : {0, 1}) {
        OracleHandle h(g);
        const long r = approx_eta_kl(h, 1, l, 0.3, rng());
        const long exact = eta_kl_exact(g, 1, l).value;
        ++total;
        if (r <= exact && r >= exact - l - static_cast<long>(0.3 * static_cast<double>(n))) ++below;
      }
    }
    CHECK(3 * below >= 2 * total);
  }
}

TEST_CASE("xi examples") {
  CHECK(xi_exact(make(2, 1, {{0, 1}}), 1, 0).value == 0);
  CHECK(xi_exact(Graph(2, 1, std::vector<Endpoints>{}), 1, 1).value == 4);
  CHECK(xi_exact(cycle(4), 1, 1).value == 0);
  CHECK(xi_exact(make(3, 2, {{0, 1}, {1, 2}}), 1, 1).value == 2);
  CHECK_THROWS_AS(xi_exact(cycle(8), 1, 1), TooLarge);
}

TEST_CASE("both xi formulations agree with a direct sub-partition search") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const Graph g = oracle::random_graph(n, rng() % (2 * n + 1), 4, rng);
    for (auto [k, l] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 0}, std::pair{2, 3}}) {
      const auto r = xi_exact(g, k, l);
      CHECK(r.value == xi_oracle(g, k, l));
      // The witness members reproduce the value.
      long sum = 0;
      for (int b = 0; b < static_cast<int>(n); ++b) {
        std::uint32_t mask = 0;
        for (VertexId v = 0; v < n; ++v) {
          if (r.block_of[v] == b) mask |= 1U << v;
        }
        if (mask) sum += g_oracle(g, mask, k, l);
      }
      CHECK(sum == r.value);
    }
  }
}

TEST_CASE("max_deficient_local examples") {
  SUBCASE("isolated vertex") {
    const Graph g = make(4, 2, {{1, 2}, {2, 3}});
    OracleHandle h(g);
    const auto x = max_deficient_local(h, 0, 3, 1, 1);
    CHECK(x.X == std::vector<VertexId>{0});
    CHECK(x.g_value == 2);
  }
  SUBCASE("triangle component") {
    const Graph g = triangles(3);
    OracleHandle h(g);
    const auto x = max_deficient_local(h, 4, 1, 1, 1);
    CHECK(x.X == std::vector<VertexId>{3, 4, 5});
    CHECK(x.g_value == 2);
  }
  SUBCASE("interior of a long cycle") {
    const Graph g = cycle(200);
    OracleHandle h(g);
    CHECK(max_deficient_local(h, 100, 4, 1, 1).g_value <= 0);
  }
  SUBCASE("cap") {
    const Graph g = cycle(200);
    OracleHandle h(g);
    CHECK_THROWS_AS(max_deficient_local(h, 0, 20, 1, 1, 10), BallTooLarge);
  }
}

TEST_CASE("max_deficient_local matches enumeration over the ball") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + rng() % 7;
    const Graph g = oracle::random_graph(n, rng() % (2 * n), 3, rng);
    const auto v = static_cast<VertexId>(rng() % n);
    const std::size_t t = 1 + rng() % 3;
    // Ball by BFS on the full graph.
    std::vector<int> dist(n, -1);
    dist[v] = 0;
    std::vector<VertexId> queue{v};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (const auto& inc : g.incidences(queue[i])) {
        if (dist[inc.neighbor] < 0 && dist[queue[i]] < static_cast<int>(t)) {
          dist[inc.neighbor] = dist[queue[i]] + 1;
          queue.push_back(inc.neighbor);
        }
      }
    }
    std::uint32_t ball = 0;
    for (VertexId u = 0; u < n; ++u) {
      if (dist[u] >= 0) ball |= 1U << u;
    }
    const std::uint32_t full = (1U << n) - 1;
    long best = -(1L << 40);
    for (std::uint32_t x = ball; x; x = (x - 1) & ball) {
      if (x != full) best = std::max(best, g_oracle(g, x, 1, 1));
    }
    OracleHandle h(g);
    const auto found = max_deficient_local(h, v, t, 1, 1);
    CHECK(found.g_value == best);
    std::uint32_t fx = 0;
    for (VertexId u : found.X) fx |= 1U << u;
    CHECK((fx & ~ball) == 0U);
    CHECK(g_oracle(g, fx, 1, 1) == found.g_value);
  }
}

TEST_CASE("orientability: exact characterizations") {
  CHECK(is_orientable_exact(cycle(4), 1, 1).orientable);
  CHECK_FALSE(is_orientable_exact(make(5, 3, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}), 1, 1).orientable);
  CHECK(is_orientable_exact(complete(4), 1, 1).orientable);
  CHECK_FALSE(is_orientable_exact(complete(4), 2, 1).orientable);
  CHECK(is_orientable_exact(complete(5), 2, 2).orientable);

  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const Graph g = oracle::random_graph(n, std::min<std::size_t>(12, rng() % (2 * n + 2)), 5, rng);
    for (auto [k, l] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 0}, std::pair{2, 2}}) {
      const auto r = is_orientable_exact(g, k, l);
      const long eta = n == 1 && l > 0 ? 0 : oracle::eta(n, oracle::edge_list(g), k, l);
      CHECK(r.orientable == (eta == 0));
      if (r.orientable) CHECK(r.forward.size() == g.m());
    }
  }
}

TEST_CASE("augmentation examples") {
  CHECK(min_augmentation_exact(cycle(4), 1, 1) == 0);
  CHECK(min_augmentation_exact(Graph(2, 1, std::vector<Endpoints>{}), 1, 1) == 2);
  CHECK(min_augmentation_exact(make(3, 2, {{0, 1}, {1, 2}}), 1, 1) == 1);
  CHECK(min_augmentation_bruteforce(Graph(2, 1, std::vector<Endpoints>{}), 1, 1) == 2);
  CHECK(min_augmentation_bruteforce(make(3, 2, {{0, 1}, {1, 2}}), 1, 1) == 1);
}

TEST_CASE("augmentation formula matches exhaustive edge addition") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const Graph g = oracle::random_graph(n, rng() % (n + 2), 4, rng);
    for (auto [k, l] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 0}}) {
      CHECK(min_augmentation_exact(g, k, l) == min_augmentation_bruteforce(g, k, l));
    }
  }
}

TEST_CASE("full graphs have no deficient proper cut") {
  std::mt19937_64 rng(83);
  int done = 0;
  while (done < 60) {
    const std::size_t n = 2 + rng() % 6;
    const Graph g = oracle::random_graph(n, 2 * n + rng() % n, 6, rng);
    const int k = 1 + static_cast<int>(rng() % 2);
    if (eta_kl_dp(g, k, 0).value != 0) continue;
    const auto edges = oracle::edge_list(g);
    const std::uint32_t full = (1U << n) - 1;
    for (std::uint32_t x = 1; x < full; ++x) {
      // eta_{k,0}(G[X]) + k <= d(X)
      CHECK(g_oracle(g, x, k, 0) <= 0);
    }
    ++done;
  }
}

TEST_CASE("orientability tester examples") {
  SUBCASE("C4 accepted") {
    const Graph g = cycle(4);
    int accepts = 0;
    for (std::uint64_t seed = 0; seed < 9; ++seed) {
      OracleHandle h(g);
      if (test_orientability(h, 1, 1, 0.2, seed).accept) ++accepts;
    }
    CHECK(accepts >= 6);
  }
  SUBCASE("isolated vertices rejected") {
    const Graph g(1000, 3, std::vector<Endpoints>{});
    int rejects = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      OracleHandle h(g);
      if (!test_orientability(h, 1, 1, 0.1, seed).accept) ++rejects;
    }
    CHECK(rejects >= 4);
  }
  SUBCASE("disjoint triangles rejected") {
    const Graph g = triangles(300);
    int rejects = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      OracleHandle h(g);
      if (!test_orientability(h, 1, 1, 0.2, seed).accept) ++rejects;
    }
    CHECK(rejects >= 4);
  }
  SUBCASE("long cycle accepted") {
    const Graph g = cycle(2000);
    int accepts = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      OracleHandle h(g);
      if (test_orientability(h, 1, 1, 0.3, seed).accept) ++accepts;
    }
    CHECK(accepts >= 4);
  }
}

TEST_CASE("local search never rejects an orientable graph") {
  std::mt19937_64 rng(97);
  int done = 0;
  while (done < 40) {
    const std::size_t n = 3 + rng() % 8;
    const Graph g = oracle::random_graph(n, n + rng() % (2 * n), 4, rng);
    if (eta_kl_dp(g, 1, 1).value != 0) continue;
    for (VertexId v = 0; v < n; ++v) {
      for (std::size_t t : {1, 2, 4}) {
        OracleHandle h(g);
        CHECK(max_deficient_local(h, v, t, 1, 1).g_value <= 0);
      }
    }
    ++done;
  }
}
