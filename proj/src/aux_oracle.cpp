#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "sparsity/aux_matching.hpp"

namespace sparsity {

AuxOracle::AuxOracle(PortOracle& base, int k)
    : base_(&base), k_(k), n_(base.vertex_count()), d_(base.degree_bound()) {
  if (k < 1) throw InvalidParams("auxiliary graph needs k >= 1");
}

AuxVertex AuxOracle::decode(VertexId x) const {
  if (x < d_ * n_) {
    return {0, static_cast<VertexId>(x / d_), static_cast<Port>(x % d_ + 1)};
  }
  const std::size_t y = x - d_ * n_;
  const auto k = static_cast<std::size_t>(k_);
  return {1, static_cast<VertexId>(y / k), static_cast<Port>(y % k + 1)};
}

VertexId AuxOracle::encode(const AuxVertex& a) const {
  if (a.side == 0) return static_cast<VertexId>(a.v * d_ + (a.i - 1));
  return static_cast<VertexId>(d_ * n_ + a.v * static_cast<std::size_t>(k_) + (a.i - 1));
}

std::optional<Port> AuxOracle::find_port(VertexId w, EdgeId e, Port skip, Port limit) {
  for (Port p = 1; p <= limit; ++p) {
    if (p == skip) continue;
    if (auto q = base_->query(w, p); q && q->edge == e) return p;
  }
  return std::nullopt;
}

std::optional<Incidence> AuxOracle::query_edge_side(VertexId v, Port i, Port j) {
  const auto k = static_cast<Port>(k_);
  if (j > 2 * k) return std::nullopt;
  const auto inc = base_->query(v, i);
  if (!inc || inc->neighbor > v) return std::nullopt;
  const EdgeId e = inc->edge;
  if (inc->neighbor == v) {
    // A loop is represented at its smaller port.
    if (find_port(v, e, i, i - 1)) return std::nullopt;
    if (j > k) return std::nullopt;
    return Incidence{encode({1, v, j}), e};
  }
  if (j <= k) return Incidence{encode({1, inc->neighbor, j}), e};
  return Incidence{encode({1, v, j - k}), e};
}

std::optional<Incidence> AuxOracle::query_copy_side(VertexId v, Port j) {
  if (j > d_) return std::nullopt;
  const auto inc = base_->query(v, j);
  if (!inc) return std::nullopt;
  const EdgeId e = inc->edge;
  const VertexId w = inc->neighbor;
  if (w < v) return Incidence{encode({0, v, j}), e};
  if (w == v) {
    if (find_port(v, e, j, j - 1)) return std::nullopt;
    return Incidence{encode({0, v, j}), e};
  }
  const auto p = find_port(w, e, 0, static_cast<Port>(d_));
  if (!p) throw std::logic_error("edge missing from its other endpoint");
  return Incidence{encode({0, w, *p}), e};
}

std::optional<Incidence> AuxOracle::query(VertexId x, Port j) {
  if (x >= vertex_count()) throw BadEndpoint("auxiliary vertex " + std::to_string(x) + " out of range");
  if (j == 0 || j > degree_bound()) throw BadEndpoint("auxiliary port " + std::to_string(j) + " out of range");
  const AuxVertex a = decode(x);
  return a.side == 0 ? query_edge_side(a.v, a.i, j) : query_copy_side(a.v, j);
}

BipartiteGraphOracle::BipartiteGraphOracle(const BipartiteGraph& b) : b_(&b), right_adj_(b.right) {
  for (std::size_t a = 0; a < b.left; ++a) {
    degree_ = std::max(degree_, b.adj[a].size());
    for (std::uint32_t r : b.adj[a]) right_adj_[r].push_back(static_cast<std::uint32_t>(a));
  }
  for (const auto& list : right_adj_) degree_ = std::max(degree_, list.size());
}

std::optional<Incidence> BipartiteGraphOracle::query(VertexId x, Port j) {
  if (x >= vertex_count() || j == 0 || j > degree_) throw BadEndpoint("bipartite oracle query out of range");
  ++queries_;
  if (x < b_->left) {
    const auto& list = b_->adj[x];
    if (j > list.size()) return std::nullopt;
    return Incidence{static_cast<VertexId>(b_->left + list[j - 1]), 0};
  }
  const auto& list = right_adj_[x - b_->left];
  if (j > list.size()) return std::nullopt;
  return Incidence{list[j - 1], 0};
}

BipartiteGraph aux_graph_direct(const Graph& g, int k) {
  if (k < 1) throw InvalidParams("auxiliary graph needs k >= 1");
  const std::size_t d = g.d();
  const auto kk = static_cast<std::size_t>(k);
  BipartiteGraph b;
  b.left = d * g.n();
  b.right = kk * g.n();
  b.adj.assign(b.left, {});
  for (EdgeId e = 0; e < g.m(); ++e) {
    const auto [u, v] = g.edge(e);
    const VertexId hi = std::max(u, v);
    const VertexId lo = std::min(u, v);
    const Port port = g.ports_of(hi, e).front();
    auto& list = b.adj[hi * d + (port - 1)];
    if (u != v) {
      for (std::size_t j = 0; j < kk; ++j) list.push_back(static_cast<std::uint32_t>(lo * kk + j));
    }
    for (std::size_t j = 0; j < kk; ++j) list.push_back(static_cast<std::uint32_t>(hi * kk + j));
  }
  return b;
}

BipartiteGraph materialize(BipartiteOracle& oracle) {
  BipartiteGraph b;
  b.left = oracle.left_count();
  b.right = oracle.vertex_count() - b.left;
  b.adj.assign(b.left, {});
  const auto deg = static_cast<Port>(oracle.degree_bound());
  for (VertexId x = 0; x < b.left; ++x) {
    for (Port j = 1; j <= deg; ++j) {
      if (auto q = oracle.query(x, j)) {
        if (q->neighbor < b.left) throw std::logic_error("edge inside the left side");
        b.adj[x].push_back(static_cast<std::uint32_t>(q->neighbor - b.left));
      }
    }
  }
  // The right side must report exactly the same edges.
  std::vector<std::vector<std::uint32_t>> from_right(b.left);
  for (std::size_t r = 0; r < b.right; ++r) {
    const auto x = static_cast<VertexId>(b.left + r);
    for (Port j = 1; j <= deg; ++j) {
      if (auto q = oracle.query(x, j)) {
        if (q->neighbor >= b.left) throw std::logic_error("edge inside the right side");
        from_right[q->neighbor].push_back(static_cast<std::uint32_t>(r));
      }
    }
  }
  for (std::size_t a = 0; a < b.left; ++a) {
    auto lhs = b.adj[a];
    std::sort(lhs.begin(), lhs.end());
    std::sort(from_right[a].begin(), from_right[a].end());
    if (lhs != from_right[a]) throw std::logic_error("oracle answers are not symmetric");
  }
  return b;
}

MatchingResult max_matching_exact(const BipartiteGraph& b) {
  constexpr std::int64_t kFree = -1;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  MatchingResult res;
  res.mate_left.assign(b.left, kFree);
  std::vector<std::int64_t> mate_right(b.right, kFree);
  std::vector<std::size_t> dist(b.left);
  std::vector<std::size_t> next(b.left);

  auto bfs = [&] {
    std::deque<std::size_t> queue;
    for (std::size_t a = 0; a < b.left; ++a) {
      dist[a] = res.mate_left[a] == kFree ? 0 : kInf;
      if (dist[a] == 0) queue.push_back(a);
    }
    bool found = false;
    while (!queue.empty()) {
      const std::size_t a = queue.front();
      queue.pop_front();
      for (std::uint32_t r : b.adj[a]) {
        const std::int64_t a2 = mate_right[r];
        if (a2 == kFree) {
          found = true;
        } else if (dist[static_cast<std::size_t>(a2)] == kInf) {
          dist[static_cast<std::size_t>(a2)] = dist[a] + 1;
          queue.push_back(static_cast<std::size_t>(a2));
        }
      }
    }
    return found;
  };

  // Iterative layered DFS from a free left vertex.
  auto augment = [&](std::size_t root) {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      if (next[a] == b.adj[a].size()) {
        dist[a] = kInf;
        stack.pop_back();
        continue;
      }
      const std::uint32_t r = b.adj[a][next[a]];
      const std::int64_t a2 = mate_right[r];
      if (a2 == kFree) {
        // Flip the path root .. a, r.
        for (std::size_t level = stack.size(); level-- > 0;) {
          const std::size_t x = stack[level];
          const std::uint32_t y = b.adj[x][next[x]];
          mate_right[y] = static_cast<std::int64_t>(x);
          res.mate_left[x] = y;
        }
        return true;
      }
      if (dist[static_cast<std::size_t>(a2)] == dist[a] + 1) {
        stack.push_back(static_cast<std::size_t>(a2));
      } else {
        ++next[a];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t a = 0; a < b.left; ++a) {
      if (res.mate_left[a] == kFree && augment(a)) ++res.size;
    }
  }
  return res;
}

}  // namespace sparsity
