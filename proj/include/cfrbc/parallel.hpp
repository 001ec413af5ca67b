#pragma once

#include <cstddef>
#include <functional>

namespace cfrbc {

/// Worker count: CONFORMAL_FRBC_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so output is order independent.
/// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cfrbc
