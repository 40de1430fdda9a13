#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gzi {

/// Binary indexed tree over non-negative integer weights at positions 1..n.
/// Point update and prefix search are O(log n); the total is exact.
class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n = 0) : tree_(n + 1, 0), values_(n + 1, 0) {
    for (mask_ = 1; mask_ * 2 <= n; mask_ *= 2) {
    }
  }

  std::size_t size() const noexcept { return values_.size() - 1; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t value(std::size_t i) const noexcept { return values_[i]; }

  void set(std::size_t i, std::int64_t v) {
    const std::int64_t delta = v - values_[i];
    if (delta == 0) return;
    values_[i] = v;
    total_ += delta;
    for (; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  /// Smallest position i with prefix_sum(i) > k, for 0 <= k < total().
  std::size_t find(std::int64_t k) const noexcept {
    std::size_t pos = 0;
    for (std::size_t step = mask_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= k) {
        pos = next;
        k -= tree_[next];
      }
    }
    return pos + 1;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> values_;
  std::int64_t total_ = 0;
  std::size_t mask_ = 1;
};

}  // namespace gzi
