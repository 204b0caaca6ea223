#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Everything here works straight from the counting definitions, never through
// the library's pebble game or matching code.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "sparsity/graph.hpp"

namespace oracle {

using sparsity::Endpoints;
using sparsity::Graph;

/// |F'| <= k|V(F')| - l for every non-empty F' among the subsets of `mask`.
inline bool is_sparse(const std::vector<Endpoints>& edges, std::uint32_t mask, int k, int l) {
  for (std::uint32_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
    std::set<std::uint32_t> vs;
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      if (sub >> i & 1U) {
        vs.insert(edges[i].u);
        vs.insert(edges[i].v);
      }
    }
    if (std::popcount(sub) > k * static_cast<long>(vs.size()) - l) return false;
  }
  return true;
}

/// Table of sparse masks; sparse[m] checks all submasks through the table.
inline std::vector<char> sparse_table(const std::vector<Endpoints>& edges, int k, int l) {
  const std::uint32_t total = 1U << edges.size();
  std::vector<char> ok(total, 1);
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    std::set<std::uint32_t> vs;
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      if (mask >> i & 1U) {
        vs.insert(edges[i].u);
        vs.insert(edges[i].v);
      }
    }
    bool good = std::popcount(mask) <= k * static_cast<long>(vs.size()) - l;
    for (std::uint32_t i = 0; good && i < edges.size(); ++i) {
      if (mask >> i & 1U) good = ok[mask & ~(1U << i)] != 0;
    }
    ok[mask] = good ? 1 : 0;
  }
  return ok;
}

inline std::size_t rank(const std::vector<Endpoints>& edges, int k, int l) {
  const auto ok = sparse_table(edges, k, l);
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < ok.size(); ++mask) {
    if (ok[mask]) best = std::max<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

inline std::vector<std::uint32_t> circuits(const std::vector<Endpoints>& edges, int k, int l) {
  const auto ok = sparse_table(edges, k, l);
  std::vector<std::uint32_t> out;
  for (std::uint32_t mask = 1; mask < ok.size(); ++mask) {
    if (ok[mask]) continue;
    bool minimal = true;
    for (std::uint32_t i = 0; minimal && i < edges.size(); ++i) {
      if (mask >> i & 1U) minimal = ok[mask & ~(1U << i)] != 0;
    }
    if (minimal) out.push_back(mask);
  }
  return out;
}

/// Calls visit(labels, blocks) for every set partition of {0..n-1}.
template <typename F>
void partitions(std::size_t n, F&& visit) {
  std::vector<int> label(n, 0);
  auto rec = [&](auto&& self, std::size_t i, int blocks) -> void {
    if (i == n) {
      visit(label, blocks);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[i] = b;
      self(self, i + 1, std::max(blocks, b + 1));
    }
  };
  rec(rec, 0, 0);
}

inline long crossing(const std::vector<Endpoints>& edges, const std::vector<int>& label) {
  long c = 0;
  for (const auto& e : edges) c += label[e.u] != label[e.v] ? 1 : 0;
  return c;
}

/// max over partitions of k(|P|-1) + l - d(P); |P| >= 2 and clamped at 0 when l > 0.
inline long eta(std::size_t n, const std::vector<Endpoints>& edges, int k, int l) {
  long best = l > 0 ? 0 : -(1L << 40);
  partitions(n, [&](const std::vector<int>& label, int blocks) {
    if (l > 0 && blocks < 2) return;
    best = std::max(best, k * (blocks - 1L) + l - crossing(edges, label));
  });
  return best;
}

/// Random simple graph with at most m edges and maximum degree d.
inline Graph random_graph(std::size_t n, std::size_t m, std::size_t d, std::mt19937_64& rng) {
  std::vector<Endpoints> edges;
  std::set<std::pair<std::uint32_t, std::uint32_t>> used;
  std::vector<std::size_t> deg(n, 0);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t attempt = 0; edges.size() < m && attempt < 50 * m + 50; ++attempt) {
    std::uint32_t u = pick(rng);
    std::uint32_t v = pick(rng);
    if (u == v || deg[u] >= d || deg[v] >= d) continue;
    if (!used.insert({std::min(u, v), std::max(u, v)}).second) continue;
    ++deg[u];
    ++deg[v];
    edges.push_back({u, v});
  }
  return Graph(n, d, edges);
}

inline std::vector<Endpoints> edge_list(const Graph& g) {
  return {g.edges().begin(), g.edges().end()};
}

}  // namespace oracle
