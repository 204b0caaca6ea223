#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sparsity/types.hpp"

namespace sparsity {

struct Endpoints {
  VertexId u = 0;
  VertexId v = 0;
  friend constexpr bool operator==(const Endpoints&, const Endpoints&) = default;
};

/// One entry of an incidence list: the edge and the vertex at its other end.
/// For a self-loop the neighbor is the vertex itself.
struct Incidence {
  VertexId neighbor = 0;
  EdgeId edge = 0;
  friend constexpr bool operator==(const Incidence&, const Incidence&) = default;
};

/// An edge as seen through an oracle: identifier plus both endpoints.
struct EdgeRef {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  [[nodiscard]] bool is_loop() const { return u == v; }
};

/// Immutable undirected multigraph with a per-vertex port numbering.
///
/// Ports are assigned in insertion order: the i-th edge inserted at a vertex
/// occupies port i (1-based). A self-loop occupies two consecutive ports of
/// its vertex. Edge identifiers are 0..m-1 in insertion order.
class Graph {
 public:
  Graph() = default;
  /// Throws BadEndpoint for out-of-range endpoints and DegreeExceeded when a
  /// vertex would receive more than `degree_bound` incidences.
  Graph(std::size_t n, std::size_t degree_bound, std::span<const Endpoints> edges);

  [[nodiscard]] std::size_t n() const { return adjacency_.size(); }
  [[nodiscard]] std::size_t d() const { return degree_bound_; }
  [[nodiscard]] std::size_t m() const { return edges_.size(); }

  [[nodiscard]] const Endpoints& edge(EdgeId e) const { return edges_.at(e); }
  [[nodiscard]] std::span<const Endpoints> edges() const { return edges_; }
  [[nodiscard]] std::span<const Incidence> incidences(VertexId v) const { return adjacency_.at(v); }
  [[nodiscard]] std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }

  /// The incidence at port i of v, or nullopt if v has fewer than i incidences.
  [[nodiscard]] std::optional<Incidence> at_port(VertexId v, Port i) const;

  /// All ports of v holding edge e (two entries for a loop).
  [[nodiscard]] std::vector<Port> ports_of(VertexId v, EdgeId e) const;

  /// Subgraph on the same vertex set keeping only `keep` (renumbered in order).
  [[nodiscard]] Graph edge_subgraph(std::span<const EdgeId> keep) const;

  /// Subgraph induced by `vertices`, relabelled 0..|vertices|-1 in the given order.
  [[nodiscard]] Graph induced(std::span<const VertexId> vertices) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.degree_bound_ == b.degree_bound_ && a.edges_ == b.edges_ && a.n() == b.n();
  }

 private:
  std::size_t degree_bound_ = 0;
  std::vector<Endpoints> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// Port-query access to a bounded-degree graph: O(v, i) returns the i-th
/// incidence of v or nothing.
class PortOracle {
 public:
  virtual ~PortOracle() = default;
  [[nodiscard]] virtual std::size_t vertex_count() const = 0;
  [[nodiscard]] virtual std::size_t degree_bound() const = 0;
  virtual std::optional<Incidence> query(VertexId v, Port i) = 0;
  /// Drops memoized local state (for oracles that derive answers from local
  /// computation). Answers must not change; only the cost of later queries does.
  virtual void reset_local_state() {}
};

/// Query-counted oracle over a Graph. Every answered call, including empty
/// answers, costs exactly one query.
class OracleHandle final : public PortOracle {
 public:
  explicit OracleHandle(const Graph& g) : graph_(&g) {}
  explicit OracleHandle(const Graph&&) = delete;

  [[nodiscard]] std::size_t vertex_count() const override { return graph_->n(); }
  [[nodiscard]] std::size_t degree_bound() const override { return graph_->d(); }
  std::optional<Incidence> query(VertexId v, Port i) override;

  [[nodiscard]] std::uint64_t query_count() const { return query_count_; }
  [[nodiscard]] const Graph& graph() const { return *graph_; }

  /// When set, the queried vertex of every call is appended to `trace`.
  void set_trace(std::vector<VertexId>* trace) { trace_ = trace; }

 private:
  const Graph* graph_;
  std::uint64_t query_count_ = 0;
  std::vector<VertexId>* trace_ = nullptr;
};

/// Forwards to another oracle and counts the calls made through it.
class CountingOracle final : public PortOracle {
 public:
  explicit CountingOracle(PortOracle& inner) : inner_(&inner) {}
  [[nodiscard]] std::size_t vertex_count() const override { return inner_->vertex_count(); }
  [[nodiscard]] std::size_t degree_bound() const override { return inner_->degree_bound(); }
  std::optional<Incidence> query(VertexId v, Port i) override {
    ++count_;
    return inner_->query(v, i);
  }
  void reset_local_state() override { inner_->reset_local_state(); }
  [[nodiscard]] std::uint64_t count() const { return count_; }

 private:
  PortOracle* inner_;
  std::uint64_t count_ = 0;
};

/// Caches full incidence lists fetched through an oracle. Fetching a vertex
/// costs d queries the first time and nothing afterwards.
class LocalView {
 public:
  explicit LocalView(PortOracle& oracle) : oracle_(&oracle) {}

  /// (port, incidence) pairs of v, in port order.
  const std::vector<std::pair<Port, Incidence>>& incidences(VertexId v);
  [[nodiscard]] std::size_t degree_bound() const { return oracle_->degree_bound(); }
  [[nodiscard]] std::uint64_t queries_spent() const { return queries_; }
  [[nodiscard]] bool fetched(VertexId v) const { return cache_.contains(v); }

 private:
  PortOracle* oracle_;
  std::unordered_map<VertexId, std::vector<std::pair<Port, Incidence>>> cache_;
  std::uint64_t queries_ = 0;
};

/// The subgraph induced by vertices within distance `radius` of either endpoint of `center`.
struct EdgeBall {
  EdgeRef center;
  std::size_t radius = 0;
  std::vector<VertexId> vertices;  // sorted
  std::vector<EdgeRef> edges;      // sorted by id, each edge once
  std::uint64_t queries_spent = 0;

  [[nodiscard]] bool contains_vertex(VertexId v) const;
};

/// Breadth-first exploration through the oracle only.
EdgeBall explore_ball(PortOracle& oracle, const EdgeRef& center, std::size_t radius);
/// Same, reusing incidence lists already cached in `view`; queries_spent
/// counts only the new queries.
EdgeBall explore_ball(LocalView& view, const EdgeRef& center, std::size_t radius);

/// Queries every port of every vertex and rebuilds the graph seen through the
/// oracle (edges in order of first appearance).
Graph materialize_graph(PortOracle& oracle);

/// Parses the edge-list text format ("n d" header, one "u v" per line, '#' comments).
Graph read_graph(std::string_view text);
Graph read_graph_file(const std::string& path);
std::string write_graph(const Graph& g);

}  // namespace sparsity
