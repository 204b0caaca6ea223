#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sparsity/graph.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

/// A port oracle whose vertices 0..left_count()-1 form one side of a
/// bipartition and the rest form the other side.
class BipartiteOracle : public PortOracle {
 public:
  [[nodiscard]] virtual std::size_t left_count() const = 0;
};

/// Vertex of the auxiliary graph G_k. side 0: (v, i) with i in [1, d] stands
/// for the i-th edge at v; side 1: (v, i) with i in [1, k] is the i-th copy of v.
struct AuxVertex {
  int side = 0;
  VertexId v = 0;
  Port i = 1;
  friend constexpr bool operator==(const AuxVertex&, const AuxVertex&) = default;
};

/// Oracle access to G_k built on top of oracle access to G.
///
/// The pair (v, i) is valid when the i-th edge at v exists and v is its
/// larger endpoint; a loop is valid at its smaller port only. A valid pair
/// for the edge uv is adjacent to (1, u, j) and (1, v, j) for j in [1, k]
/// (a loop to (1, v, j) only). Invalid pairs are isolated.
///
/// Integer ids: side 0 occupies [0, d n), side 1 occupies [d n, (d + k) n).
class AuxOracle final : public BipartiteOracle {
 public:
  AuxOracle(PortOracle& base, int k);

  [[nodiscard]] std::size_t vertex_count() const override { return (d_ + static_cast<std::size_t>(k_)) * n_; }
  [[nodiscard]] std::size_t degree_bound() const override { return std::max<std::size_t>(2 * static_cast<std::size_t>(k_), d_); }
  [[nodiscard]] std::size_t left_count() const override { return d_ * n_; }

  /// Each call costs at most d + 1 queries to the base oracle.
  std::optional<Incidence> query(VertexId x, Port j) override;
  void reset_local_state() override { base_->reset_local_state(); }

  [[nodiscard]] AuxVertex decode(VertexId x) const;
  [[nodiscard]] VertexId encode(const AuxVertex& a) const;
  [[nodiscard]] int k() const { return k_; }

 private:
  std::optional<Incidence> query_edge_side(VertexId v, Port i, Port j);
  std::optional<Incidence> query_copy_side(VertexId v, Port j);
  /// Port at w other than `skip` that holds edge e, scanning ports in order.
  std::optional<Port> find_port(VertexId w, EdgeId e, Port skip, Port limit);

  PortOracle* base_;
  int k_;
  std::size_t n_;
  std::size_t d_;
};

/// Materialized bipartite graph: adj[a] lists the right-side indices adjacent
/// to left vertex a.
struct BipartiteGraph {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::vector<std::uint32_t>> adj;
  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;
};

/// Port oracle over a materialized bipartite graph (left ids first, then right).
class BipartiteGraphOracle final : public BipartiteOracle {
 public:
  explicit BipartiteGraphOracle(const BipartiteGraph& b);
  [[nodiscard]] std::size_t vertex_count() const override { return b_->left + b_->right; }
  [[nodiscard]] std::size_t degree_bound() const override { return degree_; }
  [[nodiscard]] std::size_t left_count() const override { return b_->left; }
  std::optional<Incidence> query(VertexId x, Port j) override;
  [[nodiscard]] std::uint64_t query_count() const { return queries_; }

 private:
  const BipartiteGraph* b_;
  std::vector<std::vector<std::uint32_t>> right_adj_;
  std::size_t degree_ = 0;
  std::uint64_t queries_ = 0;
};

/// G_k built directly from the edge list, ids as in AuxOracle.
BipartiteGraph aux_graph_direct(const Graph& g, int k);

/// Every vertex and port of a bipartite oracle, queried exhaustively.
BipartiteGraph materialize(BipartiteOracle& oracle);

struct MatchingResult {
  std::size_t size = 0;
  /// mate_left[a] is the right index matched to a, or -1.
  std::vector<std::int64_t> mate_left;
};

/// Maximum matching by Hopcroft-Karp.
MatchingResult max_matching_exact(const BipartiteGraph& b);

/// How long the estimator's local memo tables live.
enum class MemoScope {
  PerRun,     ///< shared by all samples of one estimate
  PerSample,  ///< cleared before each sample, so each sample pays its full local cost
};

struct MatchingOptions {
  /// Rounds of augmentation after the greedy matching. Round r adds a maximal
  /// set of disjoint augmenting paths of length 2r + 1.
  int phases = 2;
  /// Overrides the sample count derived from epsilon.
  std::optional<std::size_t> samples;
  /// Solve exactly when the oracle has no more vertices than the sample count.
  bool exact_fallback = true;
  MemoScope memo = MemoScope::PerRun;
};

struct MatchingEstimate {
  std::int64_t value = 0;
  double epsilon = 0;
  double confidence = 2.0 / 3.0;
  std::uint64_t queries = 0;
  std::size_t samples = 0;
  bool exact = false;
};

/// Estimates the maximum matching size M* of a bipartite oracle with N vertices.
/// With probability at least 2/3 the value lies in [M* - eps N, M*].
MatchingEstimate approx_matching_size(BipartiteOracle& oracle, double epsilon, std::uint64_t seed,
                                      const MatchingOptions& options = {});

/// The matching the estimator simulates locally, evaluated at every vertex:
/// entry x is the mate of x or -1. Intended for inspection and tests.
std::vector<std::int64_t> simulate_local_matching(BipartiteOracle& oracle, std::uint64_t seed, int phases);

/// Number of samples used for a given error target.
std::size_t matching_sample_count(std::size_t side, std::size_t total, double epsilon);

/// Estimates rho_{k,0} of the graph behind `oracle` within eps n, through G_k.
MatchingEstimate approx_rank_k0(PortOracle& oracle, int k, double epsilon, std::uint64_t seed,
                                const MatchingOptions& options = {});

}  // namespace sparsity
