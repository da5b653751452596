#pragma once

#include <cstddef>
#include <functional>

namespace gibbslab {

// Worker count: GIBBSLAB_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs fn(0), ..., fn(count - 1) on up to worker_count() threads. Tasks must
// not share mutable state. The first exception thrown by any task is
// rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace gibbslab
