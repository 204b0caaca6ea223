#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sparsity/graph.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

struct ExploreOptions {
  /// Upper bound on search nodes per circuit enumeration; exceeding it throws
  /// SearchBudgetExceeded rather than returning an unverified answer.
  std::size_t node_budget = 200'000;
  /// Restrict the search to the (k+1)-core of the ball. Sound for simple
  /// graphs; switched off automatically when the ball has loops or parallel edges.
  bool use_core = true;
  /// Search connected vertex sets around the seed first, falling back to direct
  /// circuit enumeration if that exceeds the budget. false skips straight to the latter.
  bool vertex_sets = true;
};

/// Either Large or a small edge set S (sorted ids, |S| < t) containing the seed.
struct ExploreOutcome {
  bool large = false;
  std::vector<EdgeId> edges;
  std::vector<Endpoints> ends;  // endpoints of edges[i]
  std::uint64_t queries = 0;
  std::size_t t = 0;
};

/// Radius beyond which no circuit of fewer than t edges through a given edge can reach.
std::size_t circuit_radius(SparsityParams params, std::size_t t);

/// All circuits C of the ball's edge set with e in C and |C| < t, each sorted.
/// Exhaustive: the search branches on every element of a fundamental circuit,
/// so any circuit through e avoiding the current deletions is still reachable.
std::vector<std::vector<EdgeId>> enumerate_small_circuits(const EdgeBall& ball, const EdgeRef& e, SparsityParams params,
                                                          std::size_t t, const ExploreOptions& options = {});

/// {e} together with every circuit through e of fewer than t edges; Large as
/// soon as that union reaches t edges.
ExploreOutcome small_circuits(PortOracle& oracle, const EdgeRef& e, SparsityParams params, std::size_t t,
                              const ExploreOptions& options = {});

/// Closure of small_circuits over the edges it returns.
ExploreOutcome component(PortOracle& oracle, const EdgeRef& e, SparsityParams params, std::size_t t,
                         const ExploreOptions& options = {});

/// Run-scoped explorer: caches incidence lists, small-circuit sets and
/// components, so that every edge of a discovered component maps to the same
/// shared outcome.
class Explorer {
 public:
  Explorer(PortOracle& oracle, SparsityParams params, std::size_t t, ExploreOptions options = {});

  ExploreOutcome small_circuits(const EdgeRef& e);
  std::shared_ptr<const ExploreOutcome> component(const EdgeRef& e);

  /// Drops every cache, including fetched incidence lists.
  void clear();
  /// Queries issued through this explorer since construction.
  [[nodiscard]] std::uint64_t queries() const { return queries_ + view_->queries_spent(); }
  [[nodiscard]] std::size_t t() const { return t_; }
  [[nodiscard]] SparsityParams params() const { return params_; }

  /// Optional worklist permutation for order-independence checks.
  void set_worklist_seed(std::uint64_t seed) { worklist_seed_ = seed; }

 private:
  PortOracle* oracle_;
  SparsityParams params_;
  std::size_t t_;
  ExploreOptions options_;
  std::unique_ptr<LocalView> view_;
  std::uint64_t queries_ = 0;
  std::uint64_t worklist_seed_ = 0;
  std::unordered_map<EdgeId, ExploreOutcome> circuits_;
  std::unordered_map<EdgeId, std::shared_ptr<const ExploreOutcome>> components_;
};

}  // namespace sparsity
