#pragma once

#include <functional>
#include <cstddef>

namespace cig {

/// Run fn(0..n_jobs-1), each index exactly once, on up to `workers` threads.
/// Callers own any per-index output slots, so results are identical for any
/// worker count. The first exception thrown by a job is rethrown after all
/// threads join.
void parallel_for(std::size_t n_jobs, int workers, const std::function<void(std::size_t)>& fn);

/// Default worker count: the CIG_WORKERS environment variable if set and
/// positive, otherwise 1.
int default_workers();

}  // namespace cig
