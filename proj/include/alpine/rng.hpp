#pragma once

#include <cmath>
#include <cstdint>

namespace alpine {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (base, tag). Used so every
// per-iteration random decision is a pure function of the campaign seed.
inline uint64_t mix_seed(uint64_t base, uint64_t tag) {
  return splitmix64(base ^ (0x567890abcdef1234ULL + splitmix64(tag)));
}

inline double u64_to_unit(uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Counter-based generator: stdlib-independent, trivially seekable.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_++); }

  double uniform01() { return u64_to_unit(next_u64()); }

  // Uniform in [0, bound). Lemire reduction; bias is negligible for the
  // bounds used here (< 2^53).
  uint64_t uniform_below(uint64_t bound) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * bound) >> 64);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace alpine
