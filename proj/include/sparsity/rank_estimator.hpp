#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sparsity/aux_matching.hpp"
#include "sparsity/graph.hpp"
#include "sparsity/local_explorer.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

/// Oracle for the pruned edge set E' = L + (union of bases B_i).
///
/// An edge whose component is Large is kept. Otherwise the component S is
/// small and the edge is kept iff it belongs to the greedy base of S (in id
/// order). All edges of one S share one memoized base.
class PrunedOracle final : public PortOracle {
 public:
  PrunedOracle(PortOracle& inner, SparsityParams params, std::size_t t, ExploreOptions options = {});

  [[nodiscard]] std::size_t vertex_count() const override { return inner_->vertex_count(); }
  [[nodiscard]] std::size_t degree_bound() const override { return inner_->degree_bound(); }
  std::optional<Incidence> query(VertexId v, Port i) override;
  void reset_local_state() override;

  [[nodiscard]] std::size_t t() const { return t_; }
  [[nodiscard]] const Explorer& explorer() const { return explorer_; }

 private:
  PortOracle* inner_;
  SparsityParams params_;
  std::size_t t_;
  Explorer explorer_;
  std::unordered_map<const ExploreOutcome*, std::unordered_set<EdgeId>> bases_;
  std::vector<std::shared_ptr<const ExploreOutcome>> keep_alive_;
};

/// Size threshold used for a rank target eps (half of the error budget goes to pruning).
std::size_t pruning_threshold(SparsityParams params, std::size_t d, double epsilon);

struct RankOptions {
  MatchingOptions matching;
  ExploreOptions explore;
};

struct RankEstimate {
  std::int64_t value = 0;
  double epsilon = 0;
  std::size_t t = 0;  // 0 when no pruning was needed
  std::uint64_t queries = 0;
  std::size_t samples = 0;
  bool exact = false;
};

/// With probability at least 2/3, rho_{k,l}(E) - eps n <= value <= rho_{k,l}(E).
RankEstimate approx_rank_kl(PortOracle& oracle, SparsityParams params, double epsilon, std::uint64_t seed,
                            const RankOptions& options = {});

struct TestVerdict {
  bool accept = true;
  std::int64_t estimate = 0;
  std::int64_t threshold = 0;
  std::uint64_t queries = 0;
  std::uint64_t seed = 0;
  bool exact = false;
  /// Vertices of a component that certifies rejection (one-sided testers).
  std::vector<VertexId> witness;
};

/// Two-sided fullness tester: accept iff the rank estimate (target eps d n / 4)
/// exceeds kn - l - eps d n / 2. Answers exactly when eps d n / 2 < 1.
TestVerdict test_fullness(PortOracle& oracle, SparsityParams params, double epsilon, std::uint64_t seed,
                          const RankOptions& options = {});

/// One-sided testers for (1,0)- and (1,1)-fullness by bounded BFS from random
/// vertices. Never rejects a full graph.
TestVerdict test_fullness_one_sided(PortOracle& oracle, int l, double epsilon, std::uint64_t seed);

}  // namespace sparsity
