#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string_view>

namespace alpine {

inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z), overflow-safe.
inline double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// log sigmoid(z) and log(1 - sigmoid(z)); always finite.
inline double log_sigmoid(double z) { return -softplus(-z); }
inline double log_one_minus_sigmoid(double z) { return -softplus(z); }

// Keeps probabilities strictly inside (0,1) even where sigmoid saturates
// in double precision.
inline double clamp_probability(double p) {
  constexpr double lo = 1e-300;
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (p < lo) return lo;
  if (p > hi) return hi;
  return p;
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// FNV-1a, used for content hashes of graphs, configs and embeddings.
class Fnv1a {
 public:
  void update(const void* data, size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void update_u64(uint64_t v) { update(&v, sizeof(v)); }
  void update_double(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    update_u64(bits);
  }
  void update_string(std::string_view s) { update(s.data(), s.size()); }
  uint64_t digest() const { return hash_; }

 private:
  uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace alpine
