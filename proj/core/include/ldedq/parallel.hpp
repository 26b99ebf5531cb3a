#pragma once

#include <cstddef>
#include <functional>

namespace ldedq {

/// Resolves a --jobs style value: <= 0 selects the hardware concurrency.
int resolve_jobs(int jobs);

/// Calls fn(i) for every i in [0, n) on up to `jobs` threads.
/// Each index is visited exactly once; the first exception thrown is rethrown
/// after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ldedq
