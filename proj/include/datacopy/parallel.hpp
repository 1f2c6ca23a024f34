#pragma once

#include <cstddef>
#include <functional>

namespace datacopy {

// Default worker count: DATACOPY_THREADS when set, else hardware concurrency.
int default_thread_count();

// Runs fn(i) for every i in [0, count). Work distribution never affects
// results: callers write to per-index slots. The first exception thrown by
// a worker is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace datacopy
