#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace sparsity {

/// Assignment of items 0..n-1 to blocks 0..blocks-1 (a restricted growth string).
struct SetPartition {
  std::vector<int> block_of;
  int blocks = 0;

  [[nodiscard]] std::vector<std::vector<int>> members() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(blocks));
    for (std::size_t i = 0; i < block_of.size(); ++i) out[static_cast<std::size_t>(block_of[i])].push_back(static_cast<int>(i));
    return out;
  }
};

/// Calls visit(block_of, blocks) once for every set partition of n items.
/// Blocks are numbered in order of first appearance. n == 0 yields the empty partition once.
template <typename Visit>
void for_each_set_partition(std::size_t n, Visit&& visit) {
  std::vector<int> a(n, 0);
  std::vector<int> prefix_max(n, 0);  // max label among a[0..i]
  if (n == 0) {
    visit(std::span<const int>(a), 0);
    return;
  }
  while (true) {
    visit(std::span<const int>(a), prefix_max[n - 1] + 1);
    // Advance to the next restricted growth string.
    std::size_t i = n - 1;
    while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
}

}  // namespace sparsity
