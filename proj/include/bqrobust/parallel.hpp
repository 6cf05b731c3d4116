#pragma once

#include <cstdint>
#include <functional>

namespace bqrobust {

/// Worker count for parallel sections: `requested` when positive, otherwise
/// the BQROBUST_THREADS environment variable, otherwise hardware concurrency.
int worker_count(int requested = 0);

/// Runs fn(0..n-1) on `threads` workers with static chunking. Each index owns
/// its own output slot, so results are independent of the worker count.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace bqrobust
