#include "alpine/threads.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace alpine {

int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("ALPINE_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return cached;
}

void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(max_threads()), count);
  if (workers <= 1 || count < 256) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const size_t chunk = (count + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t lo = w * chunk;
    const size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace alpine
