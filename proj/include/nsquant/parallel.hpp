#pragma once

#include <cstddef>
#include <functional>

namespace nsquant {

// Worker cap: NSQUANT_THREADS if set, else hardware concurrency, at least 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, count) on up to worker_count() threads with a
// static partition.  fn must not touch shared mutable state; exceptions
// propagate to the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace nsquant
