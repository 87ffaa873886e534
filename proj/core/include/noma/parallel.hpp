#pragma once

#include <functional>

namespace noma {

/// Worker count: NOMA_ALLOC_THREADS when set (clamped to [1, 256]), otherwise
/// the hardware concurrency.
int thread_budget();

/// Runs fn(i) for i in [0, n) on a temporary worker pool. Results must be
/// written to disjoint, preallocated slots so the merge is deterministic
/// regardless of the worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace noma
