#pragma once

#include <cstddef>
#include <functional>

namespace ghzclock {

/// Worker count from GHZCLOCK_WORKERS, else the hardware concurrency (>= 1).
/// Throws std::invalid_argument when the variable is set but not a positive integer.
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 = worker_count()).
/// Indices are claimed dynamically; the first exception thrown by any task is
/// rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace ghzclock
