#include "sparsity/local_explorer.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "sparsity/pebble.hpp"
#include "sparsity/rng.hpp"

namespace sparsity {

namespace {

/// The ball's edges relabelled locally and sorted by distance from the seed.
struct LocalInstance {
  std::vector<EdgeId> global;  // local index -> edge id
  std::vector<std::pair<VertexId, VertexId>> ends;
  std::size_t vertex_count = 0;
  std::size_t seed = 0;
  bool simple = true;
};

LocalInstance localize(const EdgeBall& ball, const EdgeRef& e) {
  LocalInstance inst;
  std::unordered_map<VertexId, VertexId> local;
  for (VertexId v : ball.vertices) local.emplace(v, static_cast<VertexId>(local.size()));
  inst.vertex_count = local.size();

  // Vertex distances from the seed's endpoints inside the ball.
  std::vector<std::vector<VertexId>> adj(inst.vertex_count);
  for (const auto& ref : ball.edges) {
    const VertexId a = local.at(ref.u);
    const VertexId b = local.at(ref.v);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> dist(inst.vertex_count, std::numeric_limits<std::size_t>::max());
  std::deque<VertexId> queue;
  for (VertexId s : {local.at(e.u), local.at(e.v)}) {
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const VertexId x = queue.front();
    queue.pop_front();
    for (VertexId y : adj[x]) {
      if (dist[y] > dist[x] + 1) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }

  std::vector<std::size_t> order(ball.edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto edge_dist = [&](std::size_t i) {
    return std::min(dist[local.at(ball.edges[i].u)], dist[local.at(ball.edges[i].v)]);
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edge_dist(a) < edge_dist(b); });

  std::set<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t i : order) {
    const auto& ref = ball.edges[i];
    const VertexId a = local.at(ref.u);
    const VertexId b = local.at(ref.v);
    if (ref.id == e.id) inst.seed = inst.global.size();
    inst.global.push_back(ref.id);
    inst.ends.emplace_back(a, b);
    if (a == b || !pairs.insert({std::min(a, b), std::max(a, b)}).second) inst.simple = false;
  }
  return inst;
}

/// Branch and bound over deletion sets D. At each node the fundamental circuit
/// of the seed in (Z - D) is computed; any other circuit through the seed
/// avoiding D misses some element of it, so branching on each such element
/// visits every circuit. `visit` returns true to stop the search.
template <typename Visit>
void search_circuits(const LocalInstance& inst, SparsityParams params, std::size_t t, const ExploreOptions& options,
                     Visit&& visit) {
  const std::size_t z = inst.global.size();
  const auto [su, sv] = inst.ends[inst.seed];
  const bool use_core = options.use_core && inst.simple;
  const int k = params.k;
  const int l = params.l;

  std::set<std::vector<std::uint32_t>> visited{{}};
  std::vector<std::vector<std::uint32_t>> stack{{}};
  std::size_t nodes = 0;
  std::vector<char> alive(z);
  std::vector<int> degree(inst.vertex_count);
  std::vector<std::vector<std::uint32_t>> incident(inst.vertex_count);
  for (std::uint32_t i = 0; i < z; ++i) {
    incident[inst.ends[i].first].push_back(i);
    if (inst.ends[i].second != inst.ends[i].first) incident[inst.ends[i].second].push_back(i);
  }

  while (!stack.empty()) {
    const std::vector<std::uint32_t> removed = std::move(stack.back());
    stack.pop_back();
    if (++nodes > options.node_budget) {
      throw SearchBudgetExceeded("circuit search exceeded " + std::to_string(options.node_budget) + " nodes");
    }
    std::fill(alive.begin(), alive.end(), 1);
    for (std::uint32_t f : removed) alive[f] = 0;

    if (use_core) {
      // Every vertex of a circuit in a simple graph has circuit degree >= k+1.
      std::fill(degree.begin(), degree.end(), 0);
      for (std::uint32_t i = 0; i < z; ++i) {
        if (!alive[i]) continue;
        ++degree[inst.ends[i].first];
        ++degree[inst.ends[i].second];
      }
      std::vector<VertexId> peel;
      for (VertexId x = 0; x < inst.vertex_count; ++x) {
        if (degree[x] > 0 && degree[x] < k + 1) peel.push_back(x);
      }
      while (!peel.empty()) {
        const VertexId x = peel.back();
        peel.pop_back();
        for (std::uint32_t i : incident[x]) {
          if (!alive[i]) continue;
          alive[i] = 0;
          const VertexId y = inst.ends[i].first == x ? inst.ends[i].second : inst.ends[i].first;
          --degree[x];
          if (--degree[y] == k) peel.push_back(y);
        }
      }
      if (!alive[inst.seed]) continue;
    }

    if (l >= 1 && su != sv) {
      // Circuits are bridgeless for l >= 1, so C - e holds a u-v path.
      std::vector<std::size_t> dist(inst.vertex_count, std::numeric_limits<std::size_t>::max());
      std::deque<VertexId> queue{su};
      dist[su] = 0;
      while (!queue.empty() && dist[sv] == std::numeric_limits<std::size_t>::max()) {
        const VertexId x = queue.front();
        queue.pop_front();
        for (std::uint32_t i : incident[x]) {
          if (!alive[i] || i == inst.seed) continue;
          const VertexId y = inst.ends[i].first == x ? inst.ends[i].second : inst.ends[i].first;
          if (dist[y] == std::numeric_limits<std::size_t>::max()) {
            dist[y] = dist[x] + 1;
            queue.push_back(y);
          }
        }
      }
      if (dist[sv] == std::numeric_limits<std::size_t>::max()) continue;
      const long bound = static_cast<long>(k) * static_cast<long>(dist[sv] + 1) - l + 1;
      if (bound >= static_cast<long>(t)) continue;
    }

    PebbleState state(inst.vertex_count, params);
    for (std::uint32_t i = 0; i < z; ++i) {
      if (alive[i] && i != inst.seed) state.try_insert(i, inst.ends[i].first, inst.ends[i].second, false);
    }
    const auto r = state.try_insert(static_cast<EdgeId>(inst.seed), su, sv, true);
    if (r.accepted) continue;

    if (r.circuit.size() < t) {
      std::vector<EdgeId> global;
      global.reserve(r.circuit.size());
      for (EdgeId i : r.circuit) global.push_back(inst.global[i]);
      std::sort(global.begin(), global.end());
      if (visit(global)) return;
    }
    for (EdgeId f : r.circuit) {
      if (f == inst.seed) continue;
      std::vector<std::uint32_t> next = removed;
      next.insert(std::upper_bound(next.begin(), next.end(), f), f);
      if (visited.insert(next).second) stack.push_back(std::move(next));
    }
  }
}

/// Restricts `alive` to the (k+1)-core of the edges it marks.
void peel_to_core(const LocalInstance& inst, int k, std::vector<char>& alive) {
  std::vector<int> degree(inst.vertex_count, 0);
  std::vector<std::vector<std::uint32_t>> incident(inst.vertex_count);
  for (std::uint32_t i = 0; i < inst.global.size(); ++i) {
    if (!alive[i]) continue;
    const auto [a, b] = inst.ends[i];
    ++degree[a];
    ++degree[b];
    incident[a].push_back(i);
    incident[b].push_back(i);
  }
  std::vector<VertexId> peel;
  for (VertexId x = 0; x < inst.vertex_count; ++x) {
    if (degree[x] > 0 && degree[x] < k + 1) peel.push_back(x);
  }
  while (!peel.empty()) {
    const VertexId x = peel.back();
    peel.pop_back();
    for (std::uint32_t i : incident[x]) {
      if (!alive[i]) continue;
      alive[i] = 0;
      const VertexId y = inst.ends[i].first == x ? inst.ends[i].second : inst.ends[i].first;
      --degree[x];
      if (--degree[y] == k) peel.push_back(y);
    }
  }
}

/// The seed's connected component in the matroid of the whole ball. Every
/// circuit through the seed lies inside it.
/// Only edges marked in `alive` take part.
std::vector<char> ball_component(const LocalInstance& inst, SparsityParams params, const std::vector<char>& alive) {
  const auto z = static_cast<std::uint32_t>(inst.global.size());
  const auto seed = static_cast<std::uint32_t>(inst.seed);
  std::vector<char> in(z, 0);
  if (!alive[seed]) return in;
  PebbleState state(inst.vertex_count, params);
  std::vector<std::uint32_t> rejected;
  for (std::uint32_t i = 0; i < z; ++i) {
    if (i == seed || !alive[i]) continue;
    if (!state.try_insert(i, inst.ends[i].first, inst.ends[i].second, false).accepted) rejected.push_back(i);
  }
  // Inserted last, the seed is accepted exactly when it is a coloop.
  if (state.try_insert(seed, inst.ends[seed].first, inst.ends[seed].second, false).accepted) {
    in[seed] = 1;
    return in;
  }
  rejected.push_back(seed);
  std::vector<std::uint32_t> parent(z);
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::uint32_t j : rejected) {
    for (EdgeId f : state.try_insert(j, inst.ends[j].first, inst.ends[j].second, true).circuit) {
      parent[find(f)] = find(j);
    }
  }
  for (std::uint32_t i = 0; i < z; ++i) in[i] = alive[i] && find(i) == find(seed) ? 1 : 0;
  return in;
}

/// Union of all circuits through the seed with fewer than t edges.
///
/// Such a circuit spans a connected vertex set U with at most w vertices, and
/// any circuit inside G[U] is that small. Two elements share a circuit exactly
/// when they lie in the same connected component of the matroid, so the union
/// is the seed's component in M|E(G[U]), taken over all connected U around
/// the seed. `add` returns true to stop early.
template <typename Add>
void seed_circuit_union(const LocalInstance& inst, std::vector<char> alive, SparsityParams params, std::size_t t,
                        const ExploreOptions& options, Add&& add) {
  const int k = params.k;
  const int l = params.l;
  const std::size_t w = (t + static_cast<std::size_t>(l) - 2) / static_cast<std::size_t>(k);
  if (options.use_core && inst.simple) peel_to_core(inst, k, alive);
  if (!alive[inst.seed] || w == 0) return;

  const std::size_t nv = inst.vertex_count;
  std::vector<std::vector<std::pair<VertexId, std::uint32_t>>> adj(nv);
  std::vector<long> vdeg(nv, 0);  // loops count twice
  for (std::uint32_t i = 0; i < inst.global.size(); ++i) {
    if (!alive[i]) continue;
    const auto [a, b] = inst.ends[i];
    adj[a].emplace_back(b, i);
    if (a != b) adj[b].emplace_back(a, i);
    ++vdeg[a];
    ++vdeg[b];
  }
  const long max_deg = *std::max_element(vdeg.begin(), vdeg.end());

  enum : char { kFree, kIn, kCandidate, kBanned };
  std::vector<char> state(nv, kFree);
  std::vector<VertexId> set;
  std::vector<VertexId> local(nv, 0);
  std::size_t inside = 0;  // edges of G[set]
  long degree_sum = 0;     // over set
  std::size_t nodes = 0;
  bool stop = false;

  auto count_into = [&](VertexId x) {
    std::size_t c = 0;
    for (const auto& [y, i] : adj[x]) {
      if (state[y] == kIn || y == x) ++c;
    }
    return c;
  };

  auto evaluate = [&] {
    const long need = static_cast<long>(k) * static_cast<long>(set.size()) - l + 1;
    if (static_cast<long>(inside) < need) return;
    for (std::size_t j = 0; j < set.size(); ++j) local[set[j]] = static_cast<VertexId>(j);
    std::vector<std::uint32_t> edges;
    for (VertexId x : set) {
      for (const auto& [y, i] : adj[x]) {
        if (state[y] == kIn && x <= y) {
          edges.push_back(i);
        }
      }
    }
    // The seed goes last so that it is rejected exactly when it lies on a circuit.
    std::erase(edges, static_cast<std::uint32_t>(inst.seed));
    edges.push_back(static_cast<std::uint32_t>(inst.seed));
    PebbleState pebbles(set.size(), params);
    std::vector<std::uint32_t> rejected;
    for (std::uint32_t j = 0; j < edges.size(); ++j) {
      const auto [a, b] = inst.ends[edges[j]];
      if (!pebbles.try_insert(j, local[a], local[b], false).accepted) rejected.push_back(j);
    }
    if (rejected.empty() || rejected.back() != edges.size() - 1) return;
    std::vector<std::uint32_t> parent(edges.size());
    std::iota(parent.begin(), parent.end(), 0U);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::uint32_t j : rejected) {
      const auto [a, b] = inst.ends[edges[j]];
      for (EdgeId f : pebbles.try_insert(j, local[a], local[b], true).circuit) parent[find(f)] = find(j);
    }
    const std::uint32_t root = find(static_cast<std::uint32_t>(edges.size() - 1));
    for (std::uint32_t j = 0; j < edges.size() && !stop; ++j) {
      if (find(j) == root) stop = add(inst.global[edges[j]]);
    }
  };

  // A superset with r more vertices has at most inside + boundary/2 + max_deg*r/2
  // edges, while a circuit spanning it needs k(|set| + r) - l + 1. The bound is
  // linear in r, so checking both ends of the range decides.
  auto worth_growing = [&] {
    const long size = static_cast<long>(set.size());
    const long twice_inside = 2 * static_cast<long>(inside);
    const long boundary = degree_sum - twice_inside;
    for (long r : {1L, static_cast<long>(w) - size}) {
      if (twice_inside + boundary + max_deg * r >= 2 * (k * (size + r) - l + 1)) return true;
    }
    return false;
  };

  // Each connected superset of the seed's endpoints is visited once: a
  // candidate is banned for the later siblings of the branch that added it.
  auto grow = [&](auto&& self, std::vector<VertexId> candidates) -> void {
    if (++nodes > options.node_budget) {
      throw SearchBudgetExceeded("circuit search exceeded " + std::to_string(options.node_budget) + " nodes");
    }
    evaluate();
    if (stop || set.size() >= w || !worth_growing()) return;
    std::vector<VertexId> banned;
    while (!candidates.empty() && !stop) {
      const VertexId x = candidates.back();
      candidates.pop_back();
      std::vector<VertexId> added;
      for (const auto& [y, i] : adj[x]) {
        if (state[y] == kFree) {
          state[y] = kCandidate;
          added.push_back(y);
        }
      }
      state[x] = kIn;
      set.push_back(x);
      const std::size_t gain = count_into(x);
      inside += gain;
      degree_sum += vdeg[x];
      std::vector<VertexId> next = candidates;
      next.insert(next.end(), added.begin(), added.end());
      self(self, std::move(next));
      inside -= gain;
      degree_sum -= vdeg[x];
      set.pop_back();
      for (VertexId y : added) state[y] = kFree;
      state[x] = kBanned;
      banned.push_back(x);
    }
    for (VertexId x : banned) state[x] = kCandidate;
  };

  const auto [su, sv] = inst.ends[inst.seed];
  std::vector<VertexId> candidates;
  for (VertexId s : {su, sv}) {
    if (state[s] == kIn) continue;
    state[s] = kIn;
    set.push_back(s);
    inside += count_into(s);
    degree_sum += vdeg[s];
  }
  for (VertexId s : set) {
    for (const auto& [y, i] : adj[s]) {
      if (state[y] == kFree) {
        state[y] = kCandidate;
        candidates.push_back(y);
      }
    }
  }
  if (set.size() <= w) grow(grow, std::move(candidates));
}

}  // namespace

std::size_t circuit_radius(SparsityParams params, std::size_t t) {
  // A circuit with fewer than t edges spans at most w = (t + l - 2) / k
  // vertices and is connected, so it stays within w - 1 of the seed.
  if (t < 2) return 0;
  const std::size_t w = (t + static_cast<std::size_t>(params.l) - 2) / static_cast<std::size_t>(params.k);
  return std::min(t, w >= 1 ? w - 1 : 0);
}

std::vector<std::vector<EdgeId>> enumerate_small_circuits(const EdgeBall& ball, const EdgeRef& e, SparsityParams params,
                                                          std::size_t t, const ExploreOptions& options) {
  params.require_matroidal();
  const LocalInstance inst = localize(ball, e);
  std::set<std::vector<EdgeId>> found;
  search_circuits(inst, params, t, options, [&](const std::vector<EdgeId>& c) {
    found.insert(c);
    return false;
  });
  return {found.begin(), found.end()};
}

Explorer::Explorer(PortOracle& oracle, SparsityParams params, std::size_t t, ExploreOptions options)
    : oracle_(&oracle), params_(params), t_(t), options_(options), view_(std::make_unique<LocalView>(oracle)) {
  params_.require_matroidal();
  if (t_ < 1) throw InvalidParams("size threshold t must be at least 1");
}

void Explorer::clear() {
  queries_ += view_->queries_spent();
  view_ = std::make_unique<LocalView>(*oracle_);
  circuits_.clear();
  components_.clear();
}

ExploreOutcome Explorer::small_circuits(const EdgeRef& e) {
  if (auto it = circuits_.find(e.id); it != circuits_.end()) return it->second;
  const std::uint64_t before = view_->queries_spent();
  const EdgeBall ball = explore_ball(*view_, e, circuit_radius(params_, t_));
  const LocalInstance inst = localize(ball, e);

  std::unordered_set<EdgeId> members{e.id};
  bool large = members.size() >= t_;
  if (!large) {
    std::vector<char> alive(inst.global.size(), 1);
    if (options_.use_core && inst.simple) peel_to_core(inst, params_.k, alive);
    const std::vector<char> comp = ball_component(inst, params_, alive);
    const auto comp_size = static_cast<std::size_t>(std::count(comp.begin(), comp.end(), 1));
    if (comp_size < t_) {
      // Every element of the component shares a circuit with e, and none of those circuits reaches t.
      for (std::size_t i = 0; i < comp.size(); ++i) {
        if (comp[i]) members.insert(inst.global[i]);
      }
    } else {
      auto add = [&](EdgeId f) {
        members.insert(f);
        large = members.size() >= t_;
        return large;
      };
      bool done = false;
      if (options_.vertex_sets) {
        try {
          seed_circuit_union(inst, comp, params_, t_, options_, add);
          done = true;
        } catch (const SearchBudgetExceeded&) {
          // Dense balls with large w: enumerate circuits directly instead.
        }
      }
      if (!done) {
        members = {e.id};
        large = false;
        search_circuits(inst, params_, t_, options_, [&](const std::vector<EdgeId>& c) {
          for (EdgeId f : c) {
            if (add(f)) return true;
          }
          return false;
        });
      }
    }
  }
  ExploreOutcome out;
  out.t = t_;
  out.large = large;
  if (!large) {
    out.edges.assign(members.begin(), members.end());
    std::sort(out.edges.begin(), out.edges.end());
    std::unordered_map<EdgeId, Endpoints> ends;
    for (const auto& b : ball.edges) ends.emplace(b.id, Endpoints{b.u, b.v});
    for (EdgeId g : out.edges) out.ends.push_back(ends.at(g));
  }
  out.queries = view_->queries_spent() - before;
  return circuits_.emplace(e.id, std::move(out)).first->second;
}

std::shared_ptr<const ExploreOutcome> Explorer::component(const EdgeRef& e) {
  if (auto it = components_.find(e.id); it != components_.end()) return it->second;
  const std::uint64_t before = view_->queries_spent();

  // Endpoints of every edge seen so far, so that members can be re-explored.
  std::unordered_map<EdgeId, EdgeRef> refs{{e.id, e}};
  std::unordered_set<EdgeId> members{e.id};
  std::vector<EdgeId> unchecked{e.id};
  std::mt19937_64 rng(worklist_seed_);
  auto out = std::make_shared<ExploreOutcome>();
  out->t = t_;
  out->large = members.size() >= t_;

  while (!out->large && !unchecked.empty()) {
    std::size_t pick = unchecked.size() - 1;
    if (worklist_seed_ != 0) pick = static_cast<std::size_t>(rng() % unchecked.size());
    const EdgeId f = unchecked[pick];
    unchecked.erase(unchecked.begin() + static_cast<std::ptrdiff_t>(pick));

    const EdgeRef ref = refs.at(f);
    const ExploreOutcome inner = small_circuits(ref);
    if (inner.large) {
      out->large = true;
      break;
    }
    // Remember endpoints of the new members from the ball around f.
    bool need_refs = false;
    for (EdgeId g : inner.edges) need_refs = need_refs || !refs.contains(g);
    if (need_refs) {
      const EdgeBall ball = explore_ball(*view_, ref, circuit_radius(params_, t_));
      for (const auto& b : ball.edges) refs.emplace(b.id, b);
    }
    for (EdgeId g : inner.edges) {
      if (members.insert(g).second) unchecked.push_back(g);
    }
    if (members.size() >= t_) out->large = true;
  }

  if (!out->large) {
    out->edges.assign(members.begin(), members.end());
    std::sort(out->edges.begin(), out->edges.end());
    for (EdgeId g : out->edges) out->ends.push_back({refs.at(g).u, refs.at(g).v});
  }
  out->queries = view_->queries_spent() - before;
  std::shared_ptr<const ExploreOutcome> shared = out;
  if (shared->large) {
    components_.emplace(e.id, shared);
  } else {
    for (EdgeId g : shared->edges) components_.emplace(g, shared);
  }
  return shared;
}

ExploreOutcome small_circuits(PortOracle& oracle, const EdgeRef& e, SparsityParams params, std::size_t t,
                              const ExploreOptions& options) {
  Explorer ex(oracle, params, t, options);
  return ex.small_circuits(e);
}

ExploreOutcome component(PortOracle& oracle, const EdgeRef& e, SparsityParams params, std::size_t t,
                         const ExploreOptions& options) {
  Explorer ex(oracle, params, t, options);
  return *ex.component(e);
}

}  // namespace sparsity
