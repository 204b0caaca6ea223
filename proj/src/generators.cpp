#include "sparsity/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "sparsity/orientability.hpp"
#include "sparsity/pebble.hpp"

namespace sparsity {

namespace {

constexpr std::size_t kVerifyLimit = 300;
constexpr std::size_t kRankLimit = 2000;

using Rng = std::mt19937_64;

std::size_t max_degree(std::size_t n, const std::vector<Endpoints>& edges) {
  std::vector<std::size_t> deg(n, 0);
  std::size_t best = 0;
  for (const auto& [u, v] : edges) {
    best = std::max(best, ++deg[u]);
    best = std::max(best, ++deg[v]);
  }
  return best;
}

/// Graph whose bound is at least `d` and large enough for its edges.
Graph with_bound(std::size_t n, std::size_t d, const std::vector<Endpoints>& edges) {
  return Graph(n, std::max(d, max_degree(n, edges)), edges);
}

/// Random vertex relabelling and edge order, so ids carry no construction order.
std::vector<Endpoints> shuffle_labels(std::size_t n, std::vector<Endpoints> edges, Rng& rng) {
  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), VertexId{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  for (auto& [u, v] : edges) {
    u = perm[u];
    v = perm[v];
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return edges;
}

struct BaseCase {
  std::size_t n = 0;
  std::vector<Endpoints> edges;
};

/// Depth-first search for a simple (k,l)-tight graph on n0 vertices with degrees <= d.
std::optional<std::vector<Endpoints>> search_base(std::size_t n0, SparsityParams p, std::size_t d) {
  const long target = static_cast<long>(p.k) * static_cast<long>(n0) - p.l;
  std::vector<Endpoints> pairs;
  for (VertexId u = 0; u < n0; ++u) {
    for (VertexId v = u + 1; v < n0; ++v) pairs.push_back({u, v});
  }
  if (target < 0 || static_cast<std::size_t>(target) > pairs.size() ||
      2 * static_cast<std::size_t>(target) > d * n0) {
    return std::nullopt;
  }
  const auto m0 = static_cast<std::size_t>(target);
  std::vector<Endpoints> chosen;
  std::vector<std::size_t> deg(n0, 0);
  std::size_t budget = 200'000;
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (chosen.size() == m0) return true;
    if (pairs.size() - i < m0 - chosen.size() || budget-- == 0) return false;
    const auto [u, v] = pairs[i];
    if (deg[u] < d && deg[v] < d) {
      chosen.push_back(pairs[i]);
      if (rank(Graph(n0, d, chosen), p) == chosen.size()) {
        ++deg[u];
        ++deg[v];
        if (self(self, i + 1)) return true;
        --deg[u];
        --deg[v];
      }
      chosen.pop_back();
    }
    return self(self, i + 1);
  };
  if (rec(rec, 0)) return chosen;
  return std::nullopt;
}

/// Smallest tight seed graph on at least k vertices, cached per (k, l, d).
const BaseCase& base_case(SparsityParams p, std::size_t d) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::size_t>, BaseCase> cache;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(p.k, p.l, d);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  for (std::size_t n0 = static_cast<std::size_t>(std::max(1, p.k)); n0 <= 14; ++n0) {
    if (auto edges = search_base(n0, p, d)) return cache[key] = BaseCase{n0, std::move(*edges)};
  }
  throw InfeasibleParams("no tight base case fits degree bound " + std::to_string(d));
}

/// Tight edge list on vertices 0..n-1 by vertex additions onto a base case.
std::vector<Endpoints> grow_tight(std::size_t n, SparsityParams p, std::size_t d, Rng& rng) {
  const BaseCase& base = base_case(p, d);
  if (n < base.n) {
    throw InfeasibleParams("n = " + std::to_string(n) + " is below the smallest tight seed (" + std::to_string(base.n) +
                           " vertices)");
  }
  std::vector<Endpoints> edges = base.edges;
  edges.reserve(static_cast<std::size_t>(p.k) * n);
  std::vector<std::size_t> deg(n, 0);
  std::vector<std::uint64_t> key(n);
  for (auto& x : key) x = rng();
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  // Attach to minimum-degree vertices, ties broken by a fixed random key.
  std::set<std::tuple<std::size_t, std::uint64_t, VertexId>> order;
  for (VertexId v = 0; v < base.n; ++v) order.emplace(deg[v], key[v], v);
  std::vector<VertexId> picked;
  for (auto v = static_cast<VertexId>(base.n); v < n; ++v) {
    picked.clear();
    for (auto it = order.begin(); picked.size() < static_cast<std::size_t>(p.k); ++it) {
      if (std::get<0>(*it) >= d) throw InfeasibleParams("degree bound exhausted while growing a tight graph");
      picked.push_back(std::get<2>(*it));
    }
    for (VertexId u : picked) {
      order.erase({deg[u], key[u], u});
      ++deg[u];
      order.emplace(deg[u], key[u], u);
      edges.push_back({u, v});
    }
    deg[v] = static_cast<std::size_t>(p.k);
    order.emplace(deg[v], key[v], v);
  }
  return edges;
}

/// Random cover by vertex-disjoint cycles of length >= 3.
std::vector<Endpoints> cycle_cover(std::size_t n, Rng& rng) {
  if (n < 3) throw InfeasibleParams("a cycle cover needs at least 3 vertices");
  std::vector<VertexId> perm(n);
  std::iota(perm.begin(), perm.end(), VertexId{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Endpoints> edges;
  std::size_t start = 0;
  while (start < n) {
    const std::size_t left = n - start;
    std::size_t len = left;
    if (left >= 6) len = std::uniform_int_distribution<std::size_t>(3, left - 3)(rng);
    for (std::size_t i = 0; i < len; ++i) edges.push_back({perm[start + i], perm[start + (i + 1) % len]});
    start += len;
  }
  return edges;
}

/// Pairing model followed by random switches that remove loops and parallel edges.
std::vector<Endpoints> random_regular(std::size_t n, std::size_t r, Rng& rng) {
  if (r == 0) return {};
  if (n <= r || (n * r) % 2 != 0) {
    throw InfeasibleParams("no simple " + std::to_string(r) + "-regular graph on " + std::to_string(n) + " vertices");
  }
  auto key = [](VertexId a, VertexId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (int attempt = 0; attempt < 20; ++attempt) {
    std::vector<VertexId> points;
    points.reserve(n * r);
    for (VertexId v = 0; v < n; ++v) points.insert(points.end(), r, v);
    std::shuffle(points.begin(), points.end(), rng);
    std::vector<Endpoints> edges;
    std::map<std::pair<VertexId, VertexId>, int> count;
    for (std::size_t i = 0; i < points.size(); i += 2) {
      edges.push_back({points[i], points[i + 1]});
      ++count[key(points[i], points[i + 1])];
    }
    auto bad = [&](const Endpoints& e) { return e.u == e.v || count[key(e.u, e.v)] > 1; };
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    std::size_t steps = 0;
    const std::size_t limit = 200 * edges.size() + 1000;
    bool clean = false;
    while (!clean && steps < limit) {
      clean = true;
      for (std::size_t i = 0; i < edges.size() && steps < limit; ++i) {
        if (!bad(edges[i])) continue;
        clean = false;
        ++steps;
        const std::size_t j = pick(rng);
        if (j == i) continue;
        auto [a, b] = edges[i];
        auto [c, e] = edges[j];
        if (rng() & 1U) std::swap(c, e);
        if (a == c || b == e) continue;
        if (count[key(a, c)] > 0 || count[key(b, e)] > 0) continue;
        --count[key(a, b)];
        --count[key(edges[j].u, edges[j].v)];
        edges[i] = {a, c};
        edges[j] = {b, e};
        ++count[key(a, c)];
        ++count[key(b, e)];
      }
    }
    if (clean) return edges;
  }
  throw InfeasibleParams("pairing model failed to produce a simple graph");
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
}

double cert(double missing_edges, std::size_t d, std::size_t n) {
  return 2.0 * missing_edges / (static_cast<double>(d) * static_cast<double>(n));
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Tight:
      return "tight";
    case Family::FarFromFull:
      return "far_from_full";
    case Family::Regular:
      return "regular";
    case Family::FarFromOrientable:
      return "far_from_orientable";
    case Family::LowerboundAdversary:
      return "lowerbound_adversary";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::Tight, Family::FarFromFull, Family::Regular, Family::FarFromOrientable,
                   Family::LowerboundAdversary}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidParams("unknown family '" + std::string(name) + "'");
}

Graph gen_tight(std::size_t n, int k, int l, std::size_t d, std::uint64_t seed) {
  const SparsityParams p{k, l};
  p.require_matroidal();
  if (d < 2 * static_cast<std::size_t>(k)) throw InfeasibleParams("tight generation needs d >= 2k");
  Rng rng(seed);
  std::vector<Endpoints> edges;
  if (k == 1 && l == 0) {
    edges = cycle_cover(n, rng);
  } else if (l == 0 && d == 2 * static_cast<std::size_t>(k)) {
    // Every vertex must reach degree 2k, and any 2k-regular graph is (k,0)-tight.
    edges = random_regular(n, d, rng);
  } else {
    edges = grow_tight(n, p, d, rng);
  }
  return Graph(n, d, shuffle_labels(n, std::move(edges), rng));
}

Graph gen_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d < 3) throw InfeasibleParams("regular generation needs d >= 3");
  if ((n * d) % 2 != 0) throw InfeasibleParams("n d must be even");
  Rng rng(seed);
  return Graph(n, d, random_regular(n, d, rng));
}

Generated gen_far_from_full(std::size_t n, int k, int l, std::size_t d, double epsilon, std::uint64_t seed) {
  const SparsityParams p{k, l};
  p.require_matroidal();
  require_epsilon(epsilon);
  Rng rng(seed);
  Generated out;
  double missing = 0;
  if (k >= 2) {
    const auto r = static_cast<std::size_t>(2 * k - 1);
    if (r > d) throw InfeasibleParams("degree bound below 2k - 1");
    out.graph = Graph(n, d, random_regular(n, r, rng));
    out.regime = "regular";
    // Any full graph has kn - l edges; this one has (2k - 1) n / 2.
    missing = static_cast<double>(n) / 2 - l;
  } else {
    // Paths of sigma vertices: rank n - c, so c - l edges are missing.
    auto sigma = static_cast<std::size_t>(std::ceil(4.0 / (epsilon * static_cast<double>(d))) / 2);
    sigma = std::max<std::size_t>(1, sigma);
    if (d < 2) sigma = std::min<std::size_t>(sigma, 2);
    const std::size_t c = n / sigma;
    if (c == 0) throw InfeasibleParams("n too small for the requested component size");
    std::vector<Endpoints> edges;
    for (std::size_t i = 0; i < c; ++i) {
      const std::size_t end = i + 1 == c ? n : (i + 1) * sigma;
      for (std::size_t v = i * sigma; v + 1 < end; ++v) edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + 1)});
    }
    if (max_degree(n, edges) > d) throw InfeasibleParams("components do not fit the degree bound");
    out.graph = Graph(n, d, shuffle_labels(n, std::move(edges), rng));
    out.regime = "small-components";
    missing = static_cast<double>(c) - l;
  }
  if (missing <= 0) throw InfeasibleParams("instance is not far from full");
  out.epsilon_cert = cert(missing, d, n);
  if (n <= kRankLimit) {
    const double deficit = static_cast<double>(k) * static_cast<double>(n) - l - static_cast<double>(rank(out.graph, p));
    out.verified = deficit >= missing;
  }
  return out;
}

Generated gen_far_from_orientable(std::size_t n, int k, int l, std::size_t d, double epsilon, std::uint64_t seed) {
  if (k < 1 || l < 0) throw InvalidParams("orientability requires k >= 1 and l >= 0");
  require_epsilon(epsilon);
  Rng rng(seed);
  Generated out;
  double missing = 0;
  if (l > 0) {
    if (d < 2 || n < 6) throw InfeasibleParams("triangle instances need d >= 2 and n >= 6");
    std::vector<Endpoints> edges;
    for (VertexId c = 0; 3 * c + 2 < n; ++c) {
      edges.push_back({3 * c, 3 * c + 1});
      edges.push_back({3 * c + 1, 3 * c + 2});
      edges.push_back({3 * c, 3 * c + 2});
    }
    const auto components = static_cast<double>(n / 3 + n % 3);
    // Partition into components gives eta >= k(c - 1) + l; the components
    // themselves give xi >= c (k + l).
    missing = std::max(k * (components - 1) + l, std::ceil(components * (k + l) / 2));
    const Graph plain(n, d, edges);
    out.verified = g_deficiency(plain, std::vector<VertexId>{0, 1, 2}, k, l).deficient();
    out.graph = Graph(n, d, shuffle_labels(n, std::move(edges), rng));
    out.regime = "small-components";
  } else {
    const auto r = static_cast<std::size_t>(2 * k - 1);
    if (r > d) throw InfeasibleParams("degree bound below 2k - 1");
    out.graph = Graph(n, d, random_regular(n, r, rng));
    out.regime = "regular";
    // eta_{k,0} = k(n - 1) - rho_{k,k} >= k(n - 1) - m.
    missing = static_cast<double>(n) / 2 - k;
    if (n <= kRankLimit) out.verified = static_cast<double>(eta_k0_exact(out.graph, k)) >= missing;
  }
  if (missing <= 0) throw InfeasibleParams("instance is not far from orientable");
  out.epsilon_cert = cert(missing, d, n);
  return out;
}

Graph gen_lowerbound_adversary(std::size_t n, int k, int l, std::uint64_t seed) {
  if (k < 2) throw InfeasibleParams("the adversary construction needs k >= 2");
  SparsityParams{k, l}.require_matroidal();
  Rng rng(seed);
  const auto r = static_cast<std::size_t>(2 * k - 1);
  return Graph(n, r, random_regular(n, r, rng));
}

Graph extend_vertex(const Graph& g, std::span<const VertexId> targets) {
  std::set<VertexId> distinct(targets.begin(), targets.end());
  if (distinct.size() != targets.size()) throw InvalidParams("targets must be distinct");
  if (!distinct.empty() && *distinct.rbegin() >= g.n()) throw BadEndpoint("target out of range");
  std::vector<Endpoints> edges(g.edges().begin(), g.edges().end());
  const auto v = static_cast<VertexId>(g.n());
  for (VertexId u : targets) edges.push_back({u, v});
  return with_bound(g.n() + 1, g.d(), edges);
}

Graph extend_cycle(const Graph& g, std::span<const VertexId> attach) {
  const std::size_t s = attach.size();
  if (s < 3) throw InvalidParams("a cycle needs at least 3 vertices");
  for (VertexId a : attach) {
    if (a >= g.n()) throw BadEndpoint("attachment out of range");
  }
  std::vector<Endpoints> edges(g.edges().begin(), g.edges().end());
  const auto base = static_cast<VertexId>(g.n());
  for (std::size_t i = 0; i < s; ++i) {
    const auto u = static_cast<VertexId>(base + i);
    edges.push_back({u, static_cast<VertexId>(base + (i + 1) % s)});
    edges.push_back({u, attach[i]});
  }
  return with_bound(g.n() + s, g.d(), edges);
}

Graph complete_unseen(const Graph& g, std::span<const VertexId> seen, int k, int l, std::uint64_t seed) {
  const SparsityParams p{k, l};
  p.require_matroidal();
  const std::size_t n = g.n();
  std::vector<char> in_s(n, 1);
  for (VertexId v : seen) in_s.at(v) = 0;
  std::vector<VertexId> unseen;
  for (VertexId v = 0; v < n; ++v) {
    if (in_s[v]) unseen.push_back(v);
  }

  // A full graph H on the unseen vertices, degree unconstrained.
  Rng rng(seed);
  const std::size_t free_degree = std::max<std::size_t>(2 * static_cast<std::size_t>(k), unseen.size());
  std::vector<Endpoints> h = k == 1 && l == 0 ? cycle_cover(unseen.size(), rng)
                                              : grow_tight(unseen.size(), p, free_degree, rng);
  std::vector<Endpoints> edges(g.edges().begin(), g.edges().end());
  for (const auto& [a, b] : shuffle_labels(unseen.size(), std::move(h), rng)) edges.push_back({unseen[a], unseen[b]});
  Graph out = with_bound(n, g.d(), edges);

  // Distinct neighbours per vertex, from the original graph (H lives inside S).
  std::vector<std::vector<VertexId>> nbr(n);
  for (const auto& [u, v] : g.edges()) {
    if (u == v) continue;
    nbr[u].push_back(v);
    nbr[v].push_back(u);
  }
  for (auto& list : nbr) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::vector<std::size_t> into_s(n, 0);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId w : nbr[v]) into_s[v] += in_s[w] ? 1 : 0;
  }
  std::vector<VertexId> ready;
  std::size_t outside = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (!in_s[v]) {
      ++outside;
      if (into_s[v] >= static_cast<std::size_t>(k)) ready.push_back(v);
    }
  }
  auto absorb = [&](VertexId v) {
    in_s[v] = 1;
    --outside;
    for (VertexId w : nbr[v]) {
      if (!in_s[w] && ++into_s[w] == static_cast<std::size_t>(k)) ready.push_back(w);
    }
  };

  while (outside > 0) {
    if (!ready.empty()) {
      const VertexId v = ready.back();
      ready.pop_back();
      if (!in_s[v]) absorb(v);
      continue;
    }
    if (k != 2) throw InfeasibleParams("absorption stuck with " + std::to_string(outside) + " vertices left");
    // Cycle case: a cycle outside S whose vertices all reach S, not all through one vertex.
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<VertexId> parent(n, 0);
    std::vector<VertexId> cycle;
    auto eligible = [&](VertexId v) { return !in_s[v] && into_s[v] >= 1; };
    for (VertexId r = 0; r < n && cycle.empty(); ++r) {
      if (!eligible(r) || state[r] != 0) continue;
      std::vector<std::pair<VertexId, std::size_t>> stack{{r, 0}};
      state[r] = 1;
      parent[r] = r;
      while (!stack.empty() && cycle.empty()) {
        auto& [x, next] = stack.back();
        if (next == nbr[x].size()) {
          state[x] = 2;
          stack.pop_back();
          continue;
        }
        const VertexId y = nbr[x][next++];
        if (!eligible(y) || y == parent[x]) continue;
        if (state[y] == 0) {
          state[y] = 1;
          parent[y] = x;
          stack.emplace_back(y, 0);
        } else if (state[y] == 1) {
          std::vector<VertexId> found{y};
          for (VertexId z = x; z != y; z = parent[z]) found.push_back(z);
          std::set<VertexId> hooks;
          for (VertexId z : found) {
            for (VertexId w : nbr[z]) {
              if (in_s[w]) hooks.insert(w);
            }
          }
          if (found.size() >= 3 && hooks.size() >= 2) cycle = std::move(found);
        }
      }
    }
    if (cycle.empty()) throw InfeasibleParams("absorption stuck with " + std::to_string(outside) + " vertices left");
    for (VertexId z : cycle) absorb(z);
  }

  if (n <= kVerifyLimit && !classify(out, p).full) {
    throw std::logic_error("completed graph is not full");
  }
  return out;
}

Generated generate(const GenSpec& spec) {
  const int k = spec.params.k;
  const int l = spec.params.l;
  Generated out;
  switch (spec.family) {
    case Family::Tight:
      out.graph = gen_tight(spec.n, k, l, spec.d, spec.seed);
      out.regime = k == 1 && l == 0 ? "cycle-cover" : "vertex-additions";
      if (spec.n <= kVerifyLimit) out.verified = classify(out.graph, spec.params).tight;
      break;
    case Family::FarFromFull:
      out = gen_far_from_full(spec.n, k, l, spec.d, spec.epsilon, spec.seed);
      break;
    case Family::Regular: {
      out.graph = gen_regular(spec.n, spec.d, spec.seed);
      out.regime = "regular";
      bool ok = true;
      for (VertexId v = 0; v < spec.n; ++v) ok = ok && out.graph.degree(v) == spec.d;
      out.verified = ok;
      break;
    }
    case Family::FarFromOrientable:
      out = gen_far_from_orientable(spec.n, k, l, spec.d, spec.epsilon, spec.seed);
      break;
    case Family::LowerboundAdversary: {
      out.graph = gen_lowerbound_adversary(spec.n, k, l, spec.seed);
      out.regime = "regular";
      const double missing = static_cast<double>(spec.n) / 2 - l;
      if (missing > 0) out.epsilon_cert = cert(missing, out.graph.d(), spec.n);
      break;
    }
  }
  return out;
}

std::string manifest_line(const GenSpec& spec, const Generated& gen) {
  nlohmann::json j;
  j["family"] = to_string(spec.family);
  j["n"] = spec.n;
  j["k"] = spec.params.k;
  j["l"] = spec.params.l;
  j["d"] = gen.graph.d();
  j["epsilon"] = spec.epsilon;
  j["seed"] = spec.seed;
  j["m"] = gen.graph.m();
  j["epsilon_cert"] = gen.epsilon_cert;
  j["regime"] = gen.regime;
  j["verified"] = gen.verified ? nlohmann::json(*gen.verified) : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace sparsity
