#include "sparsity/pebble.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace sparsity {

PebbleState::PebbleState(std::size_t vertex_count, SparsityParams params)
    : params_(params),
      pebbles_(vertex_count, params.k),
      out_(vertex_count),
      seen_(vertex_count, 0),
      parent_(vertex_count, 0),
      parent_arc_(vertex_count, 0) {
  params_.require_matroidal();
}

bool PebbleState::gather_one(VertexId target, VertexId blocked) {
  if (++stamp_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    stamp_ = 1;
  }
  seen_[target] = stamp_;
  seen_[blocked] = stamp_;

  std::vector<std::pair<VertexId, std::size_t>> stack{{target, 0}};
  VertexId found = target;
  while (!stack.empty() && found == target) {
    auto& [x, next] = stack.back();
    if (next == out_[x].size()) {
      stack.pop_back();
      continue;
    }
    const std::size_t arc = next++;
    const VertexId y = out_[x][arc].head;
    if (seen_[y] == stamp_) continue;
    seen_[y] = stamp_;
    parent_[y] = x;
    parent_arc_[y] = arc;
    if (pebbles_[y] > 0) {
      found = y;
    } else {
      stack.emplace_back(y, 0);
    }
  }
  if (found == target) return false;

  // Reverse the path target -> ... -> found. Collect it first so that erasing
  // arcs does not disturb indices still to be read.
  std::vector<std::pair<VertexId, std::size_t>> path;
  for (VertexId y = found; y != target; y = parent_[y]) path.emplace_back(y, parent_arc_[y]);
  for (const auto& [y, arc] : path) {
    const VertexId p = parent_[y];
    const EdgeId e = out_[p][arc].edge;
    out_[p][arc].head = std::numeric_limits<VertexId>::max();  // tombstone
    out_[y].push_back({p, e});
  }
  for (const auto& [y, arc] : path) {
    auto& list = out_[parent_[y]];
    list.erase(std::remove_if(list.begin(), list.end(),
                              [](const Arc& a) { return a.head == std::numeric_limits<VertexId>::max(); }),
               list.end());
  }
  --pebbles_[found];
  ++pebbles_[target];
  return true;
}

std::vector<EdgeId> PebbleState::reach_circuit(VertexId u, VertexId v, EdgeId id) {
  if (++stamp_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    stamp_ = 1;
  }
  std::vector<VertexId> stack{u};
  seen_[u] = stamp_;
  if (seen_[v] != stamp_) {
    seen_[v] = stamp_;
    stack.push_back(v);
  }
  std::vector<EdgeId> circuit{id};
  while (!stack.empty()) {
    const VertexId x = stack.back();
    stack.pop_back();
    for (const Arc& a : out_[x]) {
      circuit.push_back(a.edge);
      if (seen_[a.head] != stamp_) {
        seen_[a.head] = stamp_;
        stack.push_back(a.head);
      }
    }
  }
  std::sort(circuit.begin(), circuit.end());
  return circuit;
}

InsertResult PebbleState::try_insert(EdgeId id, VertexId u, VertexId v, bool want_circuit) {
  const int k = params_.k;
  const int l = params_.l;
  InsertResult result;

  if (u == v) {
    if (l >= k) {
      if (want_circuit) result.circuit = {id};
      return result;
    }
    while (pebbles_[u] < l + 1) {
      if (!gather_one(u, u)) {
        if (want_circuit) result.circuit = reach_circuit(u, u, id);
        return result;
      }
    }
    out_[u].push_back({u, id});
    --pebbles_[u];
    accepted_.push_back(id);
    result.accepted = true;
    return result;
  }

  while (pebbles_[u] + pebbles_[v] < l + 1) {
    if (pebbles_[u] < k && gather_one(u, v)) continue;
    if (pebbles_[v] < k && gather_one(v, u)) continue;
    if (want_circuit) result.circuit = reach_circuit(u, v, id);
    return result;
  }
  if (pebbles_[u] > 0) {
    out_[u].push_back({v, id});
    --pebbles_[u];
  } else {
    out_[v].push_back({u, id});
    --pebbles_[v];
  }
  accepted_.push_back(id);
  result.accepted = true;
  return result;
}

namespace {

/// Greedy insertion of `subset` (in id order) into a state over compacted vertices.
std::vector<EdgeId> greedy_base(const Graph& g, SparsityParams params, std::span<const EdgeId> subset) {
  std::vector<EdgeId> order(subset.begin(), subset.end());
  std::sort(order.begin(), order.end());
  std::unordered_map<VertexId, VertexId> local;
  auto index = [&](VertexId x) {
    return local.try_emplace(x, static_cast<VertexId>(local.size())).first->second;
  };
  std::vector<Endpoints> ends;
  ends.reserve(order.size());
  for (EdgeId e : order) {
    const auto [u, v] = g.edge(e);
    const VertexId lu = index(u);
    ends.push_back({lu, index(v)});
  }
  PebbleState state(local.size(), params);
  for (std::size_t i = 0; i < order.size(); ++i) {
    state.try_insert(order[i], ends[i].u, ends[i].v, false);
  }
  return state.accepted();
}

std::vector<EdgeId> all_edges(const Graph& g) {
  std::vector<EdgeId> ids(g.m());
  std::iota(ids.begin(), ids.end(), EdgeId{0});
  return ids;
}

}  // namespace

std::size_t rank(const Graph& g, SparsityParams params, std::span<const EdgeId> subset) {
  params.require_matroidal();
  return greedy_base(g, params, subset).size();
}

std::size_t rank(const Graph& g, SparsityParams params) {
  const auto ids = all_edges(g);
  return rank(g, params, ids);
}

Classification classify(const Graph& g, SparsityParams params) {
  Classification c;
  c.rank = rank(g, params);
  const long target = static_cast<long>(params.k) * static_cast<long>(g.n()) - params.l;
  c.sparse = c.rank == g.m();
  c.full = static_cast<long>(c.rank) == target;
  c.tight = c.sparse && c.full;
  return c;
}

std::vector<EdgeId> extract_base(const Graph& g, SparsityParams params, std::span<const EdgeId> subset) {
  params.require_matroidal();
  return greedy_base(g, params, subset);
}

long eta_k0_exact(const Graph& g, int k) {
  if (k < 1) throw InvalidParams("eta requires k >= 1");
  if (g.n() == 0) return 0;
  const auto r = rank(g, SparsityParams{k, k});
  return static_cast<long>(k) * (static_cast<long>(g.n()) - 1) - static_cast<long>(r);
}

std::size_t crossing_edges(const Graph& g, std::span<const int> block_of) {
  std::size_t cross = 0;
  for (const auto& [u, v] : g.edges()) {
    if (block_of[u] != block_of[v]) ++cross;
  }
  return cross;
}

PartitionDeficiency eta_partition_bruteforce(const Graph& g, int k, int l, std::size_t cap) {
  if (k < 1 || l < 0) throw InvalidParams("eta requires k >= 1 and l >= 0");
  if (g.n() > cap) {
    throw TooLarge("partition brute force limited to n <= " + std::to_string(cap));
  }
  PartitionDeficiency best;
  long raw_best = std::numeric_limits<long>::min();
  for_each_set_partition(g.n(), [&](std::span<const int> block_of, int blocks) {
    if (l > 0 && blocks < 2) return;
    const long value = static_cast<long>(k) * (blocks - 1) + l - static_cast<long>(crossing_edges(g, block_of));
    if (value > raw_best) {
      raw_best = value;
      best.witness.block_of.assign(block_of.begin(), block_of.end());
      best.witness.blocks = blocks;
    }
  });
  if (raw_best == std::numeric_limits<long>::min()) {
    // Fewer than two vertices with l > 0: no admissible partition.
    best.value = 0;
    best.witness.block_of.assign(g.n(), 0);
    best.witness.blocks = g.n() == 0 ? 0 : 1;
    return best;
  }
  best.value = l > 0 ? std::max(0L, raw_best) : raw_best;
  return best;
}

std::vector<bool> sparse_subset_table(const Graph& g, SparsityParams params, std::span<const EdgeId> edges) {
  const std::size_t m = edges.size();
  if (m > 24) throw TooLarge("exhaustive subset table limited to 24 edges");
  std::unordered_map<VertexId, int> local;
  std::vector<std::uint64_t> edge_vertices(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [u, v] = g.edge(edges[i]);
    const int lu = local.try_emplace(u, static_cast<int>(local.size())).first->second;
    const int lv = local.try_emplace(v, static_cast<int>(local.size())).first->second;
    edge_vertices[i] = (std::uint64_t{1} << lu) | (std::uint64_t{1} << lv);
  }
  const std::size_t total = std::size_t{1} << m;
  std::vector<std::uint64_t> vmask(total, 0);
  std::vector<bool> sparse(total, true);
  for (std::size_t mask = 1; mask < total; ++mask) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    vmask[mask] = vmask[mask & (mask - 1)] | edge_vertices[low];
    const long edges_in = std::popcount(mask);
    const long allowed = static_cast<long>(params.k) * std::popcount(vmask[mask]) - params.l;
    bool ok = edges_in <= allowed;
    for (std::size_t rest = mask; ok && rest != 0; rest &= rest - 1) {
      const std::size_t bit = rest & (~rest + 1);
      ok = sparse[mask ^ bit];
    }
    sparse[mask] = ok;
  }
  return sparse;
}

namespace {

MatroidPartition group(std::size_t m, std::vector<std::size_t>& parent) {
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<std::size_t, std::size_t> slot;
  MatroidPartition out;
  for (std::size_t e = 0; e < m; ++e) {
    auto [it, inserted] = slot.try_emplace(find(e), out.components.size());
    if (inserted) out.components.emplace_back();
    out.components[it->second].push_back(static_cast<EdgeId>(e));
  }
  for (const auto& c : out.components) out.trivial.push_back(c.size() == 1);
  return out;
}

}  // namespace

MatroidPartition components(const Graph& g, SparsityParams params) {
  params.require_matroidal();
  const std::size_t m = g.m();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  PebbleState state(g.n(), params);
  std::vector<EdgeId> rejected;
  for (EdgeId e = 0; e < m; ++e) {
    if (!state.try_insert(e, g.edge(e).u, g.edge(e).v, false).accepted) rejected.push_back(e);
  }
  // Rejections leave the state untouched, so each circuit is relative to the final base.
  for (EdgeId e : rejected) {
    const auto r = state.try_insert(e, g.edge(e).u, g.edge(e).v, true);
    for (EdgeId f : r.circuit) parent[find(f)] = find(e);
  }
  return group(m, parent);
}

MatroidPartition components_exact(const Graph& g, SparsityParams params, std::size_t cap) {
  params.require_matroidal();
  const std::size_t m = g.m();
  if (m > cap) throw TooLarge("circuit enumeration limited to m <= " + std::to_string(cap));
  const auto ids = all_edges(g);
  const auto sparse = sparse_subset_table(g, params, ids);

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  const std::size_t total = std::size_t{1} << m;
  for (std::size_t mask = 1; mask < total; ++mask) {
    if (sparse[mask]) continue;
    bool minimal = true;
    for (std::size_t rest = mask; minimal && rest != 0; rest &= rest - 1) {
      minimal = sparse[mask ^ (rest & (~rest + 1))];
    }
    if (!minimal) continue;
    const std::size_t first = static_cast<std::size_t>(std::countr_zero(mask));
    for (std::size_t rest = mask; rest != 0; rest &= rest - 1) {
      parent[find(static_cast<std::size_t>(std::countr_zero(rest)))] = find(first);
    }
  }

  std::unordered_map<std::size_t, std::size_t> slot;
  MatroidPartition out;
  for (std::size_t e = 0; e < m; ++e) {
    auto [it, inserted] = slot.try_emplace(find(e), out.components.size());
    if (inserted) out.components.emplace_back();
    out.components[it->second].push_back(static_cast<EdgeId>(e));
  }
  std::size_t total_rank = 0;
  for (const auto& c : out.components) {
    out.trivial.push_back(c.size() == 1);
    total_rank += rank(g, params, c);
  }
  if (total_rank != rank(g, params)) {
    throw std::logic_error("component ranks do not sum to the matroid rank");
  }
  return out;
}

}  // namespace sparsity
