#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>

#include "sparsity/aux_matching.hpp"
#include "sparsity/rng.hpp"

namespace sparsity {

namespace {

constexpr VertexId kNone = std::numeric_limits<VertexId>::max();

class CountingBipartite final : public BipartiteOracle {
 public:
  explicit CountingBipartite(BipartiteOracle& inner) : inner_(&inner) {}
  [[nodiscard]] std::size_t vertex_count() const override { return inner_->vertex_count(); }
  [[nodiscard]] std::size_t degree_bound() const override { return inner_->degree_bound(); }
  [[nodiscard]] std::size_t left_count() const override { return inner_->left_count(); }
  std::optional<Incidence> query(VertexId v, Port i) override {
    ++count_;
    return inner_->query(v, i);
  }
  void reset_local_state() override { inner_->reset_local_state(); }
  [[nodiscard]] std::uint64_t count() const { return count_; }

 private:
  BipartiteOracle* inner_;
  std::uint64_t count_ = 0;
};

/// Local simulation of a matching built in rounds: a greedy maximal matching
/// under random edge ranks, then per round a greedy maximal set (under random
/// path ranks) of vertex-disjoint shortest augmenting paths. Every answer is
/// derived from ranks hashed from the seed, so any two simulations with the
/// same seed agree on the same global matching.
class LocalMatching {
 public:
  LocalMatching(PortOracle& oracle, std::size_t left_count, std::uint64_t seed, int phases)
      : oracle_(&oracle), left_count_(left_count), seed_(seed), phases_(std::max(phases, 0)) {
    reset();
  }

  void reset() {
    oracle_->reset_local_state();
    view_ = std::make_unique<LocalView>(*oracle_);
    neighbors_.clear();
    greedy_.clear();
    levels_.assign(static_cast<std::size_t>(phases_) + 1, Level{});
  }

  bool matched(VertexId x) { return mate(phases_, x) != kNone; }
  VertexId mate_of(VertexId x) { return mate(phases_, x); }

 private:
  struct Level {
    std::vector<std::vector<VertexId>> paths;
    std::vector<std::uint64_t> rank;
    std::vector<signed char> chosen;  // -1 unknown
    std::unordered_map<std::string, std::uint32_t> index;
    std::unordered_map<VertexId, std::vector<std::uint32_t>> through;
    std::unordered_map<VertexId, VertexId> mate;
  };

  const std::vector<VertexId>& nbrs(VertexId x) {
    auto it = neighbors_.find(x);
    if (it != neighbors_.end()) return it->second;
    std::vector<VertexId> list;
    for (const auto& [port, inc] : view_->incidences(x)) list.push_back(inc.neighbor);
    return neighbors_.emplace(x, std::move(list)).first->second;
  }

  static std::uint64_t edge_key(VertexId a, VertexId b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
  }

  [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> edge_rank(VertexId a, VertexId b) const {
    const std::uint64_t key = edge_key(a, b);
    return {hash_key(seed_, {0, key}), key};
  }

  bool in_greedy(VertexId a, VertexId b) {
    const std::uint64_t key = edge_key(a, b);
    if (auto it = greedy_.find(key); it != greedy_.end()) return it->second;
    const auto r = edge_rank(a, b);
    std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, std::pair<VertexId, VertexId>>> lower;
    for (VertexId end : {a, b}) {
      const VertexId other = end == a ? b : a;
      for (VertexId c : nbrs(end)) {
        if (c == other) continue;
        const auto rc = edge_rank(end, c);
        if (rc < r) lower.push_back({rc, {end, c}});
      }
    }
    std::sort(lower.begin(), lower.end());
    bool result = true;
    for (const auto& [rc, e] : lower) {
      if (in_greedy(e.first, e.second)) {
        result = false;
        break;
      }
    }
    greedy_.emplace(key, result);
    return result;
  }

  VertexId greedy_mate(VertexId x) {
    std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, VertexId>> order;
    for (VertexId y : nbrs(x)) order.push_back({edge_rank(x, y), y});
    std::sort(order.begin(), order.end());
    for (const auto& [r, y] : order) {
      if (in_greedy(x, y)) return y;
    }
    return kNone;
  }

  VertexId mate(int level, VertexId x) {
    auto& lv = levels_[static_cast<std::size_t>(level)];
    if (auto it = lv.mate.find(x); it != lv.mate.end()) return it->second;
    VertexId result = kNone;
    if (level == 0) {
      result = greedy_mate(x);
    } else {
      bool on_chosen = false;
      const std::vector<std::uint32_t> ids = paths_through(level, x);
      for (std::uint32_t pid : ids) {
        if (!chosen(level, pid)) continue;
        const auto& p = levels_[static_cast<std::size_t>(level)].paths[pid];
        const auto pos = static_cast<std::size_t>(std::find(p.begin(), p.end(), x) - p.begin());
        // After the flip, edges (0,1), (2,3), ... are matched.
        result = pos % 2 == 0 ? p[pos + 1] : p[pos - 1];
        on_chosen = true;
        break;
      }
      if (!on_chosen) result = mate(level - 1, x);
    }
    levels_[static_cast<std::size_t>(level)].mate.emplace(x, result);
    return result;
  }

  /// Partial path from position t back to 0 (stored as p[t], p[t-1], ...).
  void extend_back(int prev, std::size_t t, std::vector<VertexId>& cur, std::vector<std::vector<VertexId>>& out) {
    if (t == 0) {
      if (mate(prev, cur.back()) == kNone) out.push_back(cur);
      return;
    }
    const VertexId y = cur.back();
    const VertexId my = mate(prev, y);
    if ((t - 1) % 2 == 1) {
      if (my == kNone || std::find(cur.begin(), cur.end(), my) != cur.end()) return;
      cur.push_back(my);
      extend_back(prev, t - 1, cur, out);
      cur.pop_back();
      return;
    }
    for (VertexId z : nbrs(y)) {
      if (z == my || std::find(cur.begin(), cur.end(), z) != cur.end()) continue;
      cur.push_back(z);
      extend_back(prev, t - 1, cur, out);
      cur.pop_back();
    }
  }

  /// Partial path from position t forward to last (stored as p[t], p[t+1], ...).
  void extend_fwd(int prev, std::size_t t, std::size_t last, std::vector<VertexId>& cur,
                  std::vector<std::vector<VertexId>>& out) {
    if (t == last) {
      if (mate(prev, cur.back()) == kNone) out.push_back(cur);
      return;
    }
    const VertexId y = cur.back();
    const VertexId my = mate(prev, y);
    if (t % 2 == 1) {
      if (my == kNone || std::find(cur.begin(), cur.end(), my) != cur.end()) return;
      cur.push_back(my);
      extend_fwd(prev, t + 1, last, cur, out);
      cur.pop_back();
      return;
    }
    for (VertexId z : nbrs(y)) {
      if (z == my || std::find(cur.begin(), cur.end(), z) != cur.end()) continue;
      cur.push_back(z);
      extend_fwd(prev, t + 1, last, cur, out);
      cur.pop_back();
    }
  }

  /// Ids of all augmenting paths of length 2 level + 1 with respect to the
  /// previous round's matching that pass through x. Paths start on the left side.
  const std::vector<std::uint32_t>& paths_through(int level, VertexId x) {
    {
      auto& lv = levels_[static_cast<std::size_t>(level)];
      if (auto it = lv.through.find(x); it != lv.through.end()) return it->second;
    }
    const int prev = level - 1;
    const std::size_t last = 2 * static_cast<std::size_t>(level) + 1;
    const bool left = x < left_count_;
    std::vector<std::uint32_t> ids;
    for (std::size_t j = 0; j <= last; ++j) {
      if ((j % 2 == 0) != left) continue;
      std::vector<std::vector<VertexId>> backs;
      std::vector<std::vector<VertexId>> fwds;
      std::vector<VertexId> cur{x};
      extend_back(prev, j, cur, backs);
      if (backs.empty()) continue;
      cur.assign(1, x);
      extend_fwd(prev, j, last, cur, fwds);
      for (const auto& b : backs) {
        for (const auto& f : fwds) {
          std::vector<VertexId> p(b.rbegin(), b.rend());
          p.insert(p.end(), f.begin() + 1, f.end());
          std::vector<VertexId> sorted = p;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
          ids.push_back(intern(level, p));
        }
      }
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return levels_[static_cast<std::size_t>(level)].through.emplace(x, std::move(ids)).first->second;
  }

  std::uint32_t intern(int level, const std::vector<VertexId>& p) {
    auto& lv = levels_[static_cast<std::size_t>(level)];
    std::string key(reinterpret_cast<const char*>(p.data()), p.size() * sizeof(VertexId));
    auto [it, inserted] = lv.index.try_emplace(std::move(key), static_cast<std::uint32_t>(lv.paths.size()));
    if (inserted) {
      std::uint64_t h = hash_key(seed_, {static_cast<std::uint64_t>(level)});
      for (VertexId v : p) h = mix64(h ^ mix64(v));
      lv.paths.push_back(p);
      lv.rank.push_back(h);
      lv.chosen.push_back(-1);
    }
    return it->second;
  }

  bool chosen(int level, std::uint32_t pid) {
    {
      const auto& lv = levels_[static_cast<std::size_t>(level)];
      if (lv.chosen[pid] >= 0) return lv.chosen[pid] == 1;
    }
    const std::vector<VertexId> p = levels_[static_cast<std::size_t>(level)].paths[pid];
    std::vector<std::uint32_t> conflicts;
    for (VertexId v : p) {
      const std::vector<std::uint32_t> ids = paths_through(level, v);
      conflicts.insert(conflicts.end(), ids.begin(), ids.end());
    }
    std::sort(conflicts.begin(), conflicts.end());
    conflicts.erase(std::unique(conflicts.begin(), conflicts.end()), conflicts.end());
    auto& lv = levels_[static_cast<std::size_t>(level)];
    auto key = [&lv](std::uint32_t q) { return std::pair{lv.rank[q], q}; };
    std::erase_if(conflicts, [&](std::uint32_t q) { return !(key(q) < key(pid)); });
    std::sort(conflicts.begin(), conflicts.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
    bool result = true;
    for (std::uint32_t q : conflicts) {
      if (chosen(level, q)) {
        result = false;
        break;
      }
    }
    levels_[static_cast<std::size_t>(level)].chosen[pid] = result ? 1 : 0;
    return result;
  }

  PortOracle* oracle_;
  std::size_t left_count_;
  std::uint64_t seed_;
  int phases_;
  std::unique_ptr<LocalView> view_;
  std::unordered_map<VertexId, std::vector<VertexId>> neighbors_;
  std::unordered_map<std::uint64_t, bool> greedy_;
  std::vector<Level> levels_;
};

}  // namespace

std::vector<std::int64_t> simulate_local_matching(BipartiteOracle& oracle, std::uint64_t seed, int phases) {
  LocalMatching lm(oracle, oracle.left_count(), derive_seed(seed, 1), phases);
  std::vector<std::int64_t> out(oracle.vertex_count(), -1);
  for (VertexId x = 0; x < out.size(); ++x) {
    const VertexId y = lm.mate_of(x);
    if (y != kNone) out[x] = y;
  }
  return out;
}

std::size_t matching_sample_count(std::size_t side, std::size_t total, double epsilon) {
  if (total == 0 || side == 0) return 1;
  const double ratio = static_cast<double>(side) / static_cast<double>(total);
  // Keeps the one-sided Hoeffding shift below a quarter of eps * total.
  const double s = 8.0 * std::log(3.0) * ratio * ratio / (epsilon * epsilon);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s)));
}

MatchingEstimate approx_matching_size(BipartiteOracle& oracle, double epsilon, std::uint64_t seed,
                                      const MatchingOptions& options) {
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  CountingBipartite counter(oracle);
  MatchingEstimate est;
  est.epsilon = epsilon;

  const std::size_t total = oracle.vertex_count();
  const std::size_t left = oracle.left_count();
  const std::size_t right = total - left;
  // Sampling the smaller side gives the smaller variance.
  const bool sample_left = left < right;
  const std::size_t side = sample_left ? left : right;
  const std::size_t offset = sample_left ? 0 : left;
  const std::size_t s = options.samples.value_or(matching_sample_count(side, total, epsilon));
  est.samples = s;

  if (side == 0 || oracle.degree_bound() == 0) {
    est.value = 0;
    return est;
  }
  if (options.exact_fallback && total <= s) {
    est.value = static_cast<std::int64_t>(max_matching_exact(materialize(counter)).size);
    est.exact = true;
    est.confidence = 1.0;
    est.queries = counter.count();
    return est;
  }

  LocalMatching lm(counter, left, derive_seed(seed, 1), options.phases);
  std::mt19937_64 rng(derive_seed(seed, 2));
  std::uniform_int_distribution<std::size_t> pick(0, side - 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < s; ++i) {
    if (options.memo == MemoScope::PerSample) lm.reset();
    if (lm.matched(static_cast<VertexId>(offset + pick(rng)))) ++hits;
  }
  const double fraction = static_cast<double>(hits) / static_cast<double>(s);
  const double shift = std::sqrt(std::log(3.0) / (2.0 * static_cast<double>(s)));
  est.value = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(static_cast<double>(side) * (fraction - shift))));
  est.queries = counter.count();
  return est;
}

MatchingEstimate approx_rank_k0(PortOracle& oracle, int k, double epsilon, std::uint64_t seed,
                                const MatchingOptions& options) {
  if (!(epsilon > 0)) throw InvalidParams("epsilon must be positive");
  CountingOracle base(oracle);
  AuxOracle aux(base, k);
  const double inner = epsilon / static_cast<double>(k + static_cast<int>(oracle.degree_bound()));
  MatchingEstimate est = approx_matching_size(aux, inner, seed, options);
  est.epsilon = epsilon;
  est.queries = base.count();
  return est;
}

}  // namespace sparsity
