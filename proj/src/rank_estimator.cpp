#include "sparsity/rank_estimator.hpp"

#include <cmath>
#include <deque>
#include <random>

#include "sparsity/pebble.hpp"

namespace sparsity {

PrunedOracle::PrunedOracle(PortOracle& inner, SparsityParams params, std::size_t t, ExploreOptions options)
    : inner_(&inner), params_(params), t_(t), explorer_(inner, params, t, options) {}

void PrunedOracle::reset_local_state() {
  explorer_.clear();
  bases_.clear();
  keep_alive_.clear();
  inner_->reset_local_state();
}

std::optional<Incidence> PrunedOracle::query(VertexId v, Port i) {
  const auto inc = inner_->query(v, i);
  if (!inc) return std::nullopt;
  const auto comp = explorer_.component(EdgeRef{inc->edge, v, inc->neighbor});
  if (comp->large) return inc;

  auto it = bases_.find(comp.get());
  if (it == bases_.end()) {
    // Greedy base of S in id order, on compacted vertices.
    std::unordered_map<VertexId, VertexId> local;
    auto index = [&](VertexId x) { return local.try_emplace(x, static_cast<VertexId>(local.size())).first->second; };
    std::vector<std::pair<VertexId, VertexId>> ends;
    for (const auto& [a, b] : comp->ends) {
      const VertexId la = index(a);
      ends.emplace_back(la, index(b));
    }
    PebbleState state(local.size(), params_);
    for (std::size_t j = 0; j < comp->edges.size(); ++j) {
      state.try_insert(comp->edges[j], ends[j].first, ends[j].second, false);
    }
    const auto& acc = state.accepted();
    it = bases_.emplace(comp.get(), std::unordered_set<EdgeId>(acc.begin(), acc.end())).first;
    keep_alive_.push_back(comp);
  }
  if (it->second.contains(inc->edge)) return inc;
  return std::nullopt;
}

std::size_t pruning_threshold(SparsityParams params, std::size_t d, double epsilon) {
  if (params.l == 0) return 0;
  const double t = 2.0 * params.l * static_cast<double>(d) / epsilon;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(t)));
}

RankEstimate approx_rank_kl(PortOracle& oracle, SparsityParams params, double epsilon, std::uint64_t seed,
                            const RankOptions& options) {
  params.require_matroidal();
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  CountingOracle counter(oracle);
  RankEstimate out;
  out.epsilon = epsilon;
  MatchingEstimate m;
  if (params.l == 0) {
    m = approx_rank_k0(counter, params.k, epsilon, seed, options.matching);
  } else {
    out.t = pruning_threshold(params, oracle.degree_bound(), epsilon);
    PrunedOracle pruned(counter, params, out.t, options.explore);
    m = approx_rank_k0(pruned, params.k, epsilon / 2, seed, options.matching);
  }
  out.value = m.value;
  out.samples = m.samples;
  out.exact = m.exact;
  out.queries = counter.count();
  return out;
}

TestVerdict test_fullness(PortOracle& oracle, SparsityParams params, double epsilon, std::uint64_t seed,
                          const RankOptions& options) {
  params.require_matroidal();
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  const auto n = static_cast<double>(oracle.vertex_count());
  const auto d = static_cast<double>(oracle.degree_bound());
  const double full = params.k * n - params.l;
  const double slack = epsilon * d * n / 2;

  TestVerdict v;
  v.seed = seed;
  if (slack < 1) {
    // Too small to be worth sampling: read the whole graph.
    CountingOracle counter(oracle);
    const Graph g = materialize_graph(counter);
    v.estimate = static_cast<std::int64_t>(rank(g, params));
    v.threshold = static_cast<std::int64_t>(full);
    v.accept = v.estimate >= v.threshold;
    v.queries = counter.count();
    v.exact = true;
    return v;
  }
  const RankEstimate est = approx_rank_kl(oracle, params, epsilon * d / 4, seed, options);
  v.estimate = est.value;
  v.threshold = static_cast<std::int64_t>(std::floor(full - slack)) + 1;
  v.accept = v.estimate >= v.threshold;
  v.queries = est.queries;
  v.exact = est.exact;
  return v;
}

TestVerdict test_fullness_one_sided(PortOracle& oracle, int l, double epsilon, std::uint64_t seed) {
  if (l != 0 && l != 1) throw InvalidParams("one-sided testers cover l = 0 and l = 1 only");
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  TestVerdict v;
  v.seed = seed;
  const std::size_t n = oracle.vertex_count();
  const std::size_t d = oracle.degree_bound();
  if (n == 0) return v;
  if (d == 0) {
    // Edgeless: (1,1)-full only for a single vertex, never (1,0)-full.
    v.accept = l == 1 && n == 1;
    if (!v.accept) v.witness = {0};
    v.exact = true;
    return v;
  }

  CountingOracle counter(oracle);
  LocalView view(counter);
  const double ed = epsilon * static_cast<double>(d);
  const auto samples = static_cast<std::size_t>(std::ceil(8.0 / ed));
  const auto bound = static_cast<std::size_t>(std::floor(4.0 / ed));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));

  for (std::size_t s = 0; s < samples && v.accept; ++s) {
    const VertexId start = pick(rng);
    std::unordered_map<VertexId, bool> seen{{start, true}};
    std::deque<VertexId> queue{start};
    std::vector<VertexId> comp;
    std::size_t degree_sum = 0;
    bool exhausted = true;
    while (!queue.empty()) {
      const VertexId x = queue.front();
      queue.pop_front();
      comp.push_back(x);
      const auto& inc = view.incidences(x);
      degree_sum += inc.size();
      for (const auto& [port, e] : inc) {
        if (seen.emplace(e.neighbor, true).second) queue.push_back(e.neighbor);
      }
      if (seen.size() > bound) {
        exhausted = false;
        break;
      }
    }
    if (!exhausted) continue;
    const std::size_t edges = degree_sum / 2;
    const bool witness = l == 1 ? comp.size() < n : edges + 1 == comp.size();
    if (witness) {
      v.accept = false;
      std::sort(comp.begin(), comp.end());
      v.witness = std::move(comp);
    }
  }
  v.queries = counter.count();
  return v;
}

}  // namespace sparsity
