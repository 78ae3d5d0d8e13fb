#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

#include "alpine/errors.hpp"

namespace alpine {

// Unordered node pair, stored with a < b. No self-pairs.
struct NodePair {
  uint32_t a = 0;
  uint32_t b = 0;

  static NodePair of(uint32_t i, uint32_t j) {
    if (i == j) throw ContractViolation("self-pair is not a valid node pair");
    return i < j ? NodePair{i, j} : NodePair{j, i};
  }

  uint64_t key() const { return (static_cast<uint64_t>(a) << 32) | b; }

  static NodePair from_key(uint64_t k) {
    return NodePair{static_cast<uint32_t>(k >> 32),
                    static_cast<uint32_t>(k & 0xffffffffULL)};
  }

  bool contains(uint32_t v) const { return a == v || b == v; }
  uint32_t other(uint32_t v) const { return a == v ? b : a; }

  auto operator<=>(const NodePair&) const = default;
};

inline uint64_t total_pairs(uint32_t n) {
  return static_cast<uint64_t>(n) * (n - 1) / 2;
}

// Pairs enumerated (0,1),(0,2),...,(0,n-1),(1,2),...; offset(i) counts the
// pairs whose smaller endpoint precedes i.
inline uint64_t pair_offset(uint32_t i, uint32_t n) {
  return static_cast<uint64_t>(i) * (n - 1) -
         static_cast<uint64_t>(i) * (i - 1) / 2;
}

inline uint64_t index_of_pair(NodePair p, uint32_t n) {
  return pair_offset(p.a, n) + (p.b - p.a - 1);
}

inline NodePair pair_from_index(uint64_t idx, uint32_t n) {
  if (idx >= total_pairs(n)) throw ContractViolation("pair index out of range");
  const double nd = static_cast<double>(n);
  double guess =
      std::floor((2.0 * nd - 1.0 -
                  std::sqrt((2.0 * nd - 1.0) * (2.0 * nd - 1.0) -
                            8.0 * static_cast<double>(idx))) /
                 2.0);
  auto i = static_cast<uint32_t>(guess < 0 ? 0 : guess);
  while (i + 1 < n && pair_offset(i + 1, n) <= idx) ++i;
  while (i > 0 && pair_offset(i, n) > idx) --i;
  const auto j = static_cast<uint32_t>(idx - pair_offset(i, n) + i + 1);
  return NodePair{i, j};
}

}  // namespace alpine
