#pragma once

#include <cstddef>
#include <functional>

namespace esslab {

/// Worker count: ESSLAB_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write results into pre-sized slots so output order never depends on
/// scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace esslab
