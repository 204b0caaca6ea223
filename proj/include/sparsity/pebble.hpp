#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsity/graph.hpp"
#include "sparsity/partitions.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

/// Outcome of offering one edge to a PebbleState.
struct InsertResult {
  bool accepted = false;
  /// On rejection: the fundamental circuit of the edge with respect to the
  /// accepted set, sorted by id, including the edge itself. Empty when the
  /// circuit was not requested.
  std::vector<EdgeId> circuit;
};

/// Incremental independence test for the (k,l)-sparsity matroid.
///
/// Every vertex holds k pebbles minus its out-degree in the orientation of
/// the accepted edges. An edge uv is accepted iff l+1 pebbles can be gathered
/// on {u, v}; pebbles are moved by reversing directed paths found by
/// depth-first search (smallest incidence first).
class PebbleState {
 public:
  PebbleState(std::size_t vertex_count, SparsityParams params);

  InsertResult try_insert(EdgeId id, VertexId u, VertexId v, bool want_circuit = true);

  [[nodiscard]] const std::vector<EdgeId>& accepted() const { return accepted_; }
  [[nodiscard]] int pebbles(VertexId v) const { return pebbles_.at(v); }
  [[nodiscard]] std::size_t out_degree(VertexId v) const { return out_.at(v).size(); }
  [[nodiscard]] std::size_t vertex_count() const { return pebbles_.size(); }
  [[nodiscard]] SparsityParams params() const { return params_; }

 private:
  struct Arc {
    VertexId head;
    EdgeId edge;
  };

  /// Moves one free pebble onto `target` from somewhere reachable, never
  /// passing through `blocked`. Returns false if none is reachable.
  bool gather_one(VertexId target, VertexId blocked);
  std::vector<EdgeId> reach_circuit(VertexId u, VertexId v, EdgeId id);

  SparsityParams params_;
  std::vector<int> pebbles_;
  std::vector<std::vector<Arc>> out_;
  std::vector<EdgeId> accepted_;

  // DFS scratch, stamped to avoid clearing.
  std::vector<std::uint32_t> seen_;
  std::vector<VertexId> parent_;
  std::vector<std::size_t> parent_arc_;
  std::uint32_t stamp_ = 0;
};

/// Rank of the edge subset F (greedy insertion in identifier order).
std::size_t rank(const Graph& g, SparsityParams params, std::span<const EdgeId> subset);
std::size_t rank(const Graph& g, SparsityParams params);

struct Classification {
  std::size_t rank = 0;
  bool sparse = false;
  bool tight = false;
  bool full = false;
};

Classification classify(const Graph& g, SparsityParams params);

/// Greedy base of S in identifier order.
std::vector<EdgeId> extract_base(const Graph& g, SparsityParams params, std::span<const EdgeId> subset);

/// k(n-1) - rho_{k,k}(E), the tree-packing deficiency.
long eta_k0_exact(const Graph& g, int k);

struct PartitionDeficiency {
  long value = 0;
  SetPartition witness;
};

/// Number of edges whose endpoints lie in different blocks.
std::size_t crossing_edges(const Graph& g, std::span<const int> block_of);

/// max over partitions F of V of k(|F|-1) + l - d_G(F). For l > 0 only
/// partitions with at least two blocks count and the result is clamped at 0;
/// for l = 0 every partition counts. Throws TooLarge when n > cap.
PartitionDeficiency eta_partition_bruteforce(const Graph& g, int k, int l, std::size_t cap = 10);

struct MatroidPartition {
  std::vector<std::vector<EdgeId>> components;  // each sorted
  std::vector<bool> trivial;
};

/// Exhaustive independence table over the subsets of `edges` (bit i of a mask
/// refers to edges[i]), computed from the counting definition alone.
std::vector<bool> sparse_subset_table(const Graph& g, SparsityParams params, std::span<const EdgeId> edges);

/// Matroid components from the fundamental circuits of the greedy base:
/// two elements share a component iff a chain of fundamental circuits links them.
MatroidPartition components(const Graph& g, SparsityParams params);

/// Matroid components found by enumerating every circuit. Throws TooLarge when m > cap.
MatroidPartition components_exact(const Graph& g, SparsityParams params, std::size_t cap = 14);

}  // namespace sparsity
