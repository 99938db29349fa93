#pragma once

#include <cstdint>
#include <functional>

namespace hybridplace {

/// Worker-thread cap: smallest of hardware concurrency, the PLACEMENT_THREADS
/// environment variable (when set), and any programmatic override.
int max_worker_threads();
void set_max_worker_threads(int n);  // 0 restores the default

/// Runs fn(i) for i in [begin, end) across worker threads in contiguous
/// chunks. Callers that reduce must collect per-index results and combine in
/// index order so the outcome is independent of scheduling.
void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t)>& fn);

}  // namespace hybridplace
