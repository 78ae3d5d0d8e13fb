#pragma once

#include <cstddef>
#include <functional>

namespace alpine {

// Worker-thread cap: ALPINE_THREADS if set, else hardware concurrency.
int max_threads();

// Applies fn(i) for i in [0, count). Each index writes only its own slot,
// so results are identical for any thread count; work is chunked evenly.
// Runs serially when count is small or a single thread is configured.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

}  // namespace alpine
