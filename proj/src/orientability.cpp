#include "sparsity/orientability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <functional>
#include <random>
#include <unordered_map>

#include "sparsity/partitions.hpp"
#include "sparsity/pebble.hpp"
#include "sparsity/rng.hpp"

namespace sparsity {

namespace {

using Mask = std::uint32_t;

void require_kl(int k, int l) {
  if (k < 1 || l < 0) throw InvalidParams("orientability requires k >= 1 and l >= 0");
}

/// d(T) for every vertex mask T, loops ignored.
std::vector<int> all_boundaries(const Graph& g) {
  const std::size_t n = g.n();
  std::vector<int> d(std::size_t{1} << n, 0);
  for (Mask t = 0; t < d.size(); ++t) {
    for (const auto& [u, v] : g.edges()) {
      if (((t >> u) & 1U) != ((t >> v) & 1U)) ++d[t];
    }
  }
  return d;
}

std::vector<VertexId> vertices_of(Mask m) {
  std::vector<VertexId> out;
  for (VertexId v = 0; m >> v; ++v) {
    if ((m >> v) & 1U) out.push_back(v);
  }
  return out;
}

/// rho_{k,k} of the edges induced by each vertex mask.
std::vector<long> induced_kk_ranks(const Graph& g, int k) {
  const std::size_t n = g.n();
  std::vector<long> r(std::size_t{1} << n, 0);
  std::vector<EdgeId> inside;
  for (Mask t = 1; t < r.size(); ++t) {
    inside.clear();
    for (EdgeId e = 0; e < g.m(); ++e) {
      const auto [u, v] = g.edge(e);
      if (((t >> u) & 1U) && ((t >> v) & 1U)) inside.push_back(e);
    }
    r[t] = static_cast<long>(rank(g, {k, k}, inside));
  }
  return r;
}

void require_small(const Graph& g, std::size_t cap, const char* what) {
  if (g.n() > cap) throw TooLarge(std::string(what) + " limited to n <= " + std::to_string(cap));
}

/// Unit-capacity max flow on a tiny dense digraph, stopping once `enough` is reached.
int max_flow(std::vector<std::vector<int>> cap, std::size_t s, std::size_t t, int enough) {
  const std::size_t n = cap.size();
  int flow = 0;
  std::vector<int> parent(n);
  while (flow < enough) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[s] = static_cast<int>(s);
    std::deque<std::size_t> queue{s};
    while (!queue.empty() && parent[t] < 0) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y = 0; y < n; ++y) {
        if (parent[y] < 0 && cap[x][y] > 0) {
          parent[y] = static_cast<int>(x);
          queue.push_back(y);
        }
      }
    }
    if (parent[t] < 0) break;
    for (std::size_t y = t; y != s; y = static_cast<std::size_t>(parent[y])) {
      const auto x = static_cast<std::size_t>(parent[y]);
      --cap[x][y];
      ++cap[y][x];
    }
    ++flow;
  }
  return flow;
}

}  // namespace

std::size_t boundary_degree(const Graph& g, std::span<const VertexId> X) {
  std::vector<char> in(g.n(), 0);
  for (VertexId x : X) in.at(x) = 1;
  std::size_t d = 0;
  for (const auto& [u, v] : g.edges()) {
    if (in[u] != in[v]) ++d;
  }
  return d;
}

DeficientSet g_deficiency(const Graph& g, std::span<const VertexId> X, int k, int l) {
  require_kl(k, l);
  if (X.empty()) throw EmptySet("g is defined on non-empty sets only");
  DeficientSet out;
  out.X.assign(X.begin(), X.end());
  std::sort(out.X.begin(), out.X.end());
  out.X.erase(std::unique(out.X.begin(), out.X.end()), out.X.end());
  const long eta = eta_k0_exact(g.induced(out.X), k);
  out.g_value = k + l - static_cast<long>(boundary_degree(g, out.X)) + eta;
  return out;
}

DeficiencyReport eta_kl_exact(const Graph& g, int k, int l, std::size_t cap) {
  require_kl(k, l);
  const auto p = eta_partition_bruteforce(g, k, l, cap);
  DeficiencyReport r;
  r.value = p.value;
  r.kind = DeficiencyReport::Kind::Partition;
  r.block_of = p.witness.block_of;
  return r;
}

DeficiencyReport eta_kl_dp(const Graph& g, int k, int l) {
  require_kl(k, l);
  require_small(g, 16, "subset dynamic programming");
  const std::size_t n = g.n();
  DeficiencyReport r;
  r.kind = DeficiencyReport::Kind::Partition;
  r.block_of.assign(n, 0);
  if (n == 0) return r;

  // Doubled weights keep everything integral: 2(k(|F|-1) - d(F)) = sum(2k - d(X)) - 2k.
  const auto d = all_boundaries(g);
  const Mask full = (Mask{1} << n) - 1;
  std::vector<long> best(std::size_t{full} + 1, 0);
  std::vector<Mask> choice(std::size_t{full} + 1, 0);
  for (Mask s = 1; s <= full; ++s) {
    const Mask low = s & -s;
    best[s] = std::numeric_limits<long>::min();
    for (Mask t = s; t; t = (t - 1) & s) {
      if (!(t & low)) continue;
      const long value = 2L * k - d[t] + best[s ^ t];
      if (value > best[s]) {
        best[s] = value;
        choice[s] = t;
      }
    }
  }

  auto unfold = [&](Mask first, Mask rest) {
    int block = 0;
    for (VertexId v : vertices_of(first)) r.block_of[v] = block;
    for (Mask s = rest; s; s ^= choice[s]) {
      ++block;
      for (VertexId v : vertices_of(choice[s])) r.block_of[v] = block;
    }
  };

  if (l == 0) {
    r.value = (best[full] - 2L * k) / 2;
    unfold(choice[full], full ^ choice[full]);
    return r;
  }
  // At least two blocks: peel off a proper first block holding the lowest vertex.
  long raw = std::numeric_limits<long>::min();
  Mask first = 0;
  for (Mask t = full; t; t = (t - 1) & full) {
    if (!(t & 1U) || t == full) continue;
    const long value = 2L * k - d[t] + best[full ^ t];
    if (value > raw) {
      raw = value;
      first = t;
    }
  }
  if (first == 0) return r;  // a single vertex admits no such partition
  unfold(first, full ^ first);
  r.value = std::max(0L, (raw - 2L * k) / 2 + l);
  return r;
}

long approx_eta_kl(PortOracle& oracle, int k, int l, double epsilon, std::uint64_t seed, const RankOptions& options) {
  require_kl(k, l);
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  const auto n = static_cast<long>(oracle.vertex_count());
  if (n == 0) return 0;
  const auto est = approx_rank_kl(oracle, {k, k}, epsilon, seed, options);
  // The rank estimate is integral and at least rho - eps n, so a floor shift suffices.
  const long shift = est.exact ? 0 : static_cast<long>(std::floor(epsilon * static_cast<double>(n)));
  return k * (n - 1) - est.value - shift;
}

DeficiencyReport xi_subpartition(const Graph& g, int k, int l) {
  require_kl(k, l);
  require_small(g, 16, "subset dynamic programming");
  const std::size_t n = g.n();
  DeficiencyReport r;
  r.kind = DeficiencyReport::Kind::SubPartition;
  r.block_of.assign(n, -1);
  if (n == 0) return r;

  const auto d = all_boundaries(g);
  const auto rk = induced_kk_ranks(g, k);
  const Mask full = (Mask{1} << n) - 1;
  auto gval = [&](Mask t) {
    const long size = std::popcount(t);
    return static_cast<long>(k + l) - d[t] + (k * (size - 1) - rk[t]);
  };
  std::vector<long> best(std::size_t{full} + 1, 0);
  std::vector<Mask> choice(std::size_t{full} + 1, 0);  // 0: lowest vertex uncovered
  for (Mask s = 1; s <= full; ++s) {
    const Mask low = s & -s;
    best[s] = best[s ^ low];
    for (Mask t = s; t; t = (t - 1) & s) {
      if (!(t & low) || t == full) continue;
      const long value = gval(t) + best[s ^ t];
      if (value > best[s]) {
        best[s] = value;
        choice[s] = t;
      }
    }
  }
  r.value = best[full];
  int block = 0;
  for (Mask s = full; s;) {
    const Mask t = choice[s];
    if (t == 0) {
      s ^= s & -s;
      continue;
    }
    for (VertexId v : vertices_of(t)) r.block_of[v] = block;
    ++block;
    s ^= t;
  }
  return r;
}

DeficiencyReport xi_exact(const Graph& g, int k, int l, std::size_t cap) {
  require_kl(k, l);
  require_small(g, std::min<std::size_t>(cap, 16), "double-partition enumeration");
  const std::size_t n = g.n();
  const auto d = all_boundaries(g);
  const Mask full = n == 0 ? 0 : (Mask{1} << n) - 1;

  // Direct form: F1 partitions X, F2 = {V \ Z : Z in P2} with P2 a partition
  // of X coarsening F1. The extra item n labels the vertices outside X.
  long direct = 0;  // X empty
  for_each_set_partition(n + 1, [&](std::span<const int> label, int blocks) {
    std::vector<Mask> outer;
    const int outside = label[n];
    for (int b = 0; b < blocks; ++b) {
      if (b == outside) continue;
      Mask z = 0;
      for (std::size_t v = 0; v < n; ++v) {
        if (label[v] == b) z |= Mask{1} << v;
      }
      if (z == full) return;  // V \ Z would be empty
      outer.push_back(z);
    }
    if (outer.empty()) return;

    long outer_cut = 0;
    for (Mask z : outer) outer_cut += d[full ^ z];

    // Refine each Z independently and combine.
    std::vector<Mask> inner;
    std::function<void(std::size_t)> refine = [&](std::size_t i) {
      if (i == outer.size()) {
        long cut = outer_cut;
        for (Mask a : inner) cut += d[a];
        // Regularity: every vertex lies in exactly |P2| members of F.
        for (std::size_t v = 0; v < n; ++v) {
          int hits = 0;
          for (Mask a : inner) hits += static_cast<int>((a >> v) & 1U);
          for (Mask z : outer) hits += static_cast<int>(((full ^ z) >> v) & 1U);
          if (hits != static_cast<int>(outer.size())) throw std::logic_error("irregular family");
        }
        if (cut % 2 != 0) throw std::logic_error("odd family cut");
        const long value = static_cast<long>(inner.size()) * k + static_cast<long>(outer.size()) * l - cut / 2;
        direct = std::max(direct, value);
        return;
      }
      const auto members = vertices_of(outer[i]);
      for_each_set_partition(members.size(), [&](std::span<const int> sub, int parts) {
        const std::size_t mark = inner.size();
        inner.resize(mark + static_cast<std::size_t>(parts), 0);
        for (std::size_t j = 0; j < members.size(); ++j) {
          inner[mark + static_cast<std::size_t>(sub[j])] |= Mask{1} << members[j];
        }
        refine(i + 1);
        inner.resize(mark);
      });
    };
    refine(0);
  });

  auto report = xi_subpartition(g, k, l);
  if (report.value != direct) {
    throw FormulationMismatch("double-partition form gives " + std::to_string(direct) + ", sub-partition form gives " +
                              std::to_string(report.value));
  }
  return report;
}

DeficientSet max_deficient_local(PortOracle& oracle, VertexId v, std::size_t t, int k, int l, std::size_t cap) {
  require_kl(k, l);
  if (t < 1) throw InvalidParams("radius must be at least 1");
  if (cap > 30) throw InvalidParams("enumeration cap above 30 is not supported");
  const std::size_t n = oracle.vertex_count();
  if (v >= n) throw BadEndpoint("vertex out of range");

  LocalView view(oracle);
  std::unordered_map<VertexId, std::size_t> index{{v, 0}};
  std::vector<VertexId> ball{v};
  std::vector<std::size_t> dist{0};
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (dist[i] == t) continue;
    for (const auto& [port, inc] : view.incidences(ball[i])) {
      if (index.contains(inc.neighbor)) continue;
      if (ball.size() == cap) throw BallTooLarge("ball exceeds " + std::to_string(cap) + " vertices");
      index.emplace(inc.neighbor, ball.size());
      ball.push_back(inc.neighbor);
      dist.push_back(dist[i] + 1);
    }
  }

  // Local edges among ball vertices plus, per vertex, the edges leaving the ball.
  const std::size_t b = ball.size();
  std::vector<Endpoints> local;
  std::vector<int> outside(b, 0);
  std::unordered_map<EdgeId, bool> seen;
  for (std::size_t i = 0; i < b; ++i) {
    for (const auto& [port, inc] : view.incidences(ball[i])) {
      const auto it = index.find(inc.neighbor);
      if (it == index.end()) {
        ++outside[i];
      } else if (seen.emplace(inc.edge, true).second) {
        local.push_back({static_cast<VertexId>(i), static_cast<VertexId>(it->second)});
      }
    }
  }

  const Mask full = (Mask{1} << b) - 1;
  const bool whole_graph = b == n;
  DeficientSet best;
  best.g_value = std::numeric_limits<long>::min();
  Mask best_mask = 0;
  for (Mask x = 1; x <= full; ++x) {
    if (whole_graph && x == full) continue;
    long boundary = 0;
    for (std::size_t i = 0; i < b; ++i) {
      if ((x >> i) & 1U) boundary += outside[i];
    }
    PebbleState state(b, {k, k});
    EdgeId id = 0;
    for (const auto& [p, q] : local) {
      const bool in_p = (x >> p) & 1U;
      const bool in_q = (x >> q) & 1U;
      if (in_p != in_q) ++boundary;
      if (in_p && in_q) state.try_insert(id, p, q, false);
      ++id;
    }
    const long size = std::popcount(x);
    const long g = k + l - boundary + k * (size - 1) - static_cast<long>(state.accepted().size());
    if (g > best.g_value) {
      best.g_value = g;
      best_mask = x;
    }
  }
  if (best_mask == 0) throw EmptySet("no admissible set in a single-vertex graph");
  for (std::size_t i = 0; i < b; ++i) {
    if ((best_mask >> i) & 1U) best.X.push_back(ball[i]);
  }
  std::sort(best.X.begin(), best.X.end());
  return best;
}

TestVerdict test_orientability(PortOracle& oracle, int k, int l, double epsilon, std::uint64_t seed,
                               const OrientabilityOptions& options) {
  require_kl(k, l);
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  TestVerdict v;
  v.seed = seed;
  v.threshold = 1;
  const std::size_t n = oracle.vertex_count();
  const std::size_t d = oracle.degree_bound();
  if (n <= 1) {
    v.exact = true;
    return v;
  }
  CountingOracle counter(oracle);
  const double edn = epsilon * static_cast<double>(d) * static_cast<double>(n);

  if (d == 0 || (l > 0 && static_cast<double>(l) >= edn / 4)) {
    // Constant-size instance: decide exactly.
    const Graph g = materialize_graph(counter);
    v.estimate = eta_kl_dp(g, k, l).value;
    v.accept = v.estimate == 0;
    v.queries = counter.count();
    v.exact = true;
    return v;
  }

  // Stage 1: one-sided underestimate of eta_{k,0} with error target eps'' d n / 4, eps'' = eps / 2.
  const double delta = epsilon * static_cast<double>(d) / 8;
  const long shift = static_cast<long>(std::floor(delta * static_cast<double>(n)));
  long x = 0;
  if (shift == 0) {
    const Graph g = materialize_graph(counter);
    x = eta_k0_exact(g, k);
    v.exact = true;
  } else {
    const auto est = approx_rank_kl(counter, {k, k}, delta, derive_seed(seed, 1), options.rank);
    x = static_cast<long>(k) * (static_cast<long>(n) - 1) - est.value - (est.exact ? 0 : shift);
    v.exact = est.exact;
  }
  v.estimate = x;
  if (x > 0) {
    v.accept = false;
    v.queries = counter.count();
    return v;
  }

  // Stage 2: look for a small deficient set near random vertices.
  if (l > 0) {
    const double ed = epsilon * static_cast<double>(d);
    const auto samples = static_cast<std::size_t>(std::ceil(8.0 * k * l / (ed * ed)));
    const auto t = static_cast<std::size_t>(std::ceil(4.0 * l / ed));
    std::mt19937_64 rng(derive_seed(seed, 2));
    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
    for (std::size_t s = 0; s < samples; ++s) {
      const auto found = max_deficient_local(counter, pick(rng), t, k, l, options.ball_cap);
      if (found.deficient()) {
        v.accept = false;
        v.witness = found.X;
        break;
      }
    }
  }
  v.queries = counter.count();
  return v;
}

OrientabilityCheck is_orientable_exact(const Graph& g, int k, int l) {
  require_kl(k, l);
  require_small(g, 8, "partition side");
  const std::size_t n = g.n();
  std::vector<EdgeId> proper;
  for (EdgeId e = 0; e < g.m(); ++e) {
    if (g.edge(e).u != g.edge(e).v) proper.push_back(e);
  }
  if (proper.size() > 16) throw TooLarge("orientation search limited to 16 non-loop edges");

  OrientabilityCheck out;
  bool by_partition = true;
  for_each_set_partition(n, [&](std::span<const int> block_of, int blocks) {
    if (!by_partition || blocks < 2) return;
    const auto cut = static_cast<long>(crossing_edges(g, block_of));
    if (cut < static_cast<long>(k) * (blocks - 1) + l) {
      by_partition = false;
      out.violating_partition.assign(block_of.begin(), block_of.end());
    }
  });

  bool by_orientation = false;
  std::vector<std::vector<int>> cap(n, std::vector<int>(n, 0));
  for (std::uint32_t dir = 0; !by_orientation && dir < (std::uint32_t{1} << proper.size()); ++dir) {
    for (auto& row : cap) std::fill(row.begin(), row.end(), 0);
    for (std::size_t i = 0; i < proper.size(); ++i) {
      const auto [u, w] = g.edge(proper[i]);
      if ((dir >> i) & 1U) {
        ++cap[w][u];
      } else {
        ++cap[u][w];
      }
    }
    bool ok = true;
    for (std::size_t x = 1; x < n && ok; ++x) {
      ok = max_flow(cap, 0, x, k) >= k && max_flow(cap, x, 0, l) >= l;
    }
    if (ok) {
      by_orientation = true;
      out.forward.assign(g.m(), true);
      for (std::size_t i = 0; i < proper.size(); ++i) out.forward[proper[i]] = ((dir >> i) & 1U) == 0;
    }
  }

  if (by_partition != by_orientation) {
    throw CharacterizationMismatch(std::string("partition condition says ") + (by_partition ? "yes" : "no") +
                                   ", orientation search says " + (by_orientation ? "yes" : "no"));
  }
  out.orientable = by_partition;
  if (out.orientable) out.violating_partition.clear();
  return out;
}

long min_augmentation_exact(const Graph& g, int k, int l) {
  require_kl(k, l);
  require_small(g, 6, "augmentation formula");
  const long xi = xi_exact(g, k, l, 6).value;
  const long eta = eta_kl_exact(g, k, l, 6).value;
  return std::max((xi + 1) / 2, eta);
}

long min_augmentation_bruteforce(const Graph& g, int k, int l, long limit) {
  require_kl(k, l);
  require_small(g, 5, "augmentation search");
  const std::size_t n = g.n();
  std::vector<Endpoints> pairs;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId w = u + 1; w < n; ++w) pairs.push_back({u, w});
  }
  const std::vector<Endpoints> base(g.edges().begin(), g.edges().end());
  auto orientable_with = [&](const std::vector<std::size_t>& added) {
    std::vector<Endpoints> edges = base;
    for (std::size_t p : added) edges.push_back(pairs[p]);
    return eta_kl_dp(Graph(n, g.d() + added.size(), edges), k, l).value == 0;
  };

  for (long gamma = 0; gamma <= limit; ++gamma) {
    // Multisets of size gamma as non-decreasing index sequences.
    std::vector<std::size_t> pick(static_cast<std::size_t>(gamma), 0);
    if (gamma > 0 && pairs.empty()) break;
    while (true) {
      if (orientable_with(pick)) return gamma;
      std::size_t i = pick.size();
      while (i > 0 && pick[i - 1] + 1 == pairs.size()) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < pick.size(); ++j) pick[j] = pick[i - 1];
    }
  }
  throw TooLarge("no augmentation with at most " + std::to_string(limit) + " edges");
}

}  // namespace sparsity
