#pragma once

#include <cstddef>
#include <functional>

namespace brainclust {

/// BRAINCLUST_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent. After a failure no new items start, and the exception of
/// the lowest failing index is rethrown once all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace brainclust
