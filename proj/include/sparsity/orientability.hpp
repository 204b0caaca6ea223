#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsity/graph.hpp"
#include "sparsity/rank_estimator.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

/// A deficiency value together with the family of vertex sets attaining it.
///
/// block_of[v] is the index of the member containing v, or -1 when v is not
/// covered (sub-partitions and subsets). For double partitions, block_of is the
/// finer partition P1 and outer_of the coarser P2 of the same covered set.
struct DeficiencyReport {
  enum class Kind { Partition, SubPartition, Subset, DoublePartition };
  long value = 0;
  Kind kind = Kind::Partition;
  std::vector<int> block_of;
  std::vector<int> outer_of;
};

/// X together with g(X) = k + l - d(X) + eta_{k,0}(G[X]).
struct DeficientSet {
  std::vector<VertexId> X;  // sorted
  long g_value = 0;
  [[nodiscard]] bool deficient() const { return g_value > 0; }
};

/// Number of edges with exactly one endpoint in X.
std::size_t boundary_degree(const Graph& g, std::span<const VertexId> X);

DeficientSet g_deficiency(const Graph& g, std::span<const VertexId> X, int k, int l);

/// Partition deficiency by enumerating every partition (n <= cap).
DeficiencyReport eta_kl_exact(const Graph& g, int k, int l, std::size_t cap = 10);

/// Same value by dynamic programming over vertex subsets (n <= 16).
DeficiencyReport eta_kl_dp(const Graph& g, int k, int l);

/// One-sided estimate: with probability >= 2/3 the result lies in
/// [eta_{k,l} - l - eps n, eta_{k,l}].
long approx_eta_kl(PortOracle& oracle, int k, int l, double epsilon, std::uint64_t seed,
                   const RankOptions& options = {});

/// Augmentation deficiency. Evaluates both the double-partition form and the
/// sub-partition form, throws FormulationMismatch if they differ, and returns
/// the sub-partition witness. Members are non-empty proper subsets of V.
DeficiencyReport xi_exact(const Graph& g, int k, int l, std::size_t cap = 7);

/// Sub-partition form alone, by subset dynamic programming (n <= 16).
DeficiencyReport xi_subpartition(const Graph& g, int k, int l);

/// Maximizes g over non-empty X within distance t of v (X != V).
/// Throws BallTooLarge when the ball has more than `cap` vertices.
DeficientSet max_deficient_local(PortOracle& oracle, VertexId v, std::size_t t, int k, int l, std::size_t cap = 22);

struct OrientabilityOptions {
  RankOptions rank;
  std::size_t ball_cap = 22;
};

/// Constant-query tester for (k,l)-edge-connected orientability.
TestVerdict test_orientability(PortOracle& oracle, int k, int l, double epsilon, std::uint64_t seed,
                               const OrientabilityOptions& options = {});

struct OrientabilityCheck {
  bool orientable = false;
  /// For orientable graphs: forward[e] is true when edge e is directed u -> v.
  std::vector<bool> forward;
  /// For non-orientable graphs: a partition violating the cut condition.
  std::vector<int> violating_partition;
};

/// Decides orientability twice, by the partition condition (n <= 8) and by
/// searching all orientations with max-flow checks from root 0 (m <= 16), and
/// throws CharacterizationMismatch if the answers differ.
OrientabilityCheck is_orientable_exact(const Graph& g, int k, int l);

/// Fewest extra edges making G orientable: max(ceil(xi / 2), eta_{k,l}) (n <= 6).
long min_augmentation_exact(const Graph& g, int k, int l);

/// Fewest extra edges by trying every multiset of added vertex pairs (n <= 5).
long min_augmentation_bruteforce(const Graph& g, int k, int l, long limit = 16);

}  // namespace sparsity
