#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace entperc {

// Disjoint sets over 32-bit node indices. A root stores minus its component
// size; other entries store their parent. Union by size, path halving.
class UnionFind {
 public:
  UnionFind() = default;
  explicit UnionFind(std::size_t n) { reset(n); }

  void reset(std::size_t n) {
    parent_.assign(n, -1);
    largest_ = n > 0 ? 1 : 0;
  }

  std::size_t size() const noexcept { return parent_.size(); }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] >= 0) {
      const auto p = static_cast<std::uint32_t>(parent_[x]);
      const std::int32_t grand = parent_[p];
      if (grand < 0) return p;
      parent_[x] = grand;
      x = static_cast<std::uint32_t>(grand);
    }
    return x;
  }

  // Returns true when a and b were in different components.
  bool unite(std::uint32_t a, std::uint32_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (parent_[a] > parent_[b]) std::swap(a, b);  // a is the larger set
    parent_[a] += parent_[b];
    parent_[b] = static_cast<std::int32_t>(a);
    largest_ = std::max<std::size_t>(largest_, static_cast<std::size_t>(-parent_[a]));
    return true;
  }

  std::size_t component_size(std::uint32_t x) noexcept { return static_cast<std::size_t>(-parent_[find(x)]); }
  std::size_t largest() const noexcept { return largest_; }

 private:
  std::vector<std::int32_t> parent_;
  std::size_t largest_ = 0;
};

}  // namespace entperc
