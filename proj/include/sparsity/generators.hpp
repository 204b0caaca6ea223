#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsity/graph.hpp"
#include "sparsity/types.hpp"

namespace sparsity {

enum class Family { Tight, FarFromFull, Regular, FarFromOrientable, LowerboundAdversary };

std::string to_string(Family f);
/// Accepts the names produced by to_string; throws InvalidParams otherwise.
Family family_from_string(std::string_view name);

struct GenSpec {
  Family family = Family::Tight;
  std::size_t n = 0;
  SparsityParams params{2, 3};
  std::size_t d = 4;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
};

struct Generated {
  Graph graph;
  /// Lower bound on the distance to the target property (0 when not applicable).
  double epsilon_cert = 0;
  /// Which construction produced the instance, e.g. "regular" or "small-components".
  std::string regime;
  /// Result of an exact post-check; empty when the instance was too large to check.
  std::optional<bool> verified;
};

/// A (k,l)-tight graph on n vertices with maximum degree at most d.
/// (1,0) uses a random cover by cycles; other parameters grow a small exact
/// base case by repeatedly adding a vertex joined to k distinct existing vertices.
Graph gen_tight(std::size_t n, int k, int l, std::size_t d, std::uint64_t seed);

/// Random simple d-regular graph from the pairing model with switch repairs.
Graph gen_regular(std::size_t n, std::size_t d, std::uint64_t seed);

/// Far from (k,l)-fullness: a (2k-1)-regular graph for k >= 2, many small
/// path components for k = 1. epsilon_cert counts the edges any completion must add.
Generated gen_far_from_full(std::size_t n, int k, int l, std::size_t d, double epsilon, std::uint64_t seed);

/// Far from (k,l)-orientability: disjoint triangles (every one deficient) when
/// l > 0, a (2k-1)-regular graph with large eta_{k,0} when l = 0.
Generated gen_far_from_orientable(std::size_t n, int k, int l, std::size_t d, double epsilon, std::uint64_t seed);

/// (2k-1)-regular random graph, k >= 2.
Graph gen_lowerbound_adversary(std::size_t n, int k, int l, std::uint64_t seed);

/// Adds a (k,l)-full graph on the unseen vertices and shows the union is full
/// by absorbing the remaining vertices one at a time, or a whole cycle at a
/// time when k = 2. Throws InfeasibleParams if absorption gets stuck.
Graph complete_unseen(const Graph& g, std::span<const VertexId> seen, int k, int l, std::uint64_t seed);

/// New vertex joined to each of `targets` (distinct, existing).
Graph extend_vertex(const Graph& g, std::span<const VertexId> targets);

/// New cycle u_0 .. u_{s-1} (s = attach.size() >= 3) with u_i joined to attach[i].
Graph extend_cycle(const Graph& g, std::span<const VertexId> attach);

/// Dispatches on spec.family and runs the exact post-checks that fit.
Generated generate(const GenSpec& spec);

/// One JSON object (no trailing newline) describing a generated instance.
std::string manifest_line(const GenSpec& spec, const Generated& gen);

}  // namespace sparsity
