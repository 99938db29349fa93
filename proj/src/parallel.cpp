#include "hybridplace/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hybridplace {

namespace {
std::atomic<int> g_override{0};
}

int max_worker_threads() {
  const int ov = g_override.load();
  if (ov > 0) return ov;
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("PLACEMENT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void set_max_worker_threads(int n) { g_override.store(n > 0 ? n : 0); }

void parallel_for(int64_t begin, int64_t end,
                  const std::function<void(int64_t)>& fn) {
  const int64_t total = end - begin;
  if (total <= 0) return;
  const int nthreads = std::min<int64_t>(max_worker_threads(), total);
  if (nthreads <= 1) {
    for (int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const int64_t chunk = (total + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const int64_t lo = begin + t * chunk;
    const int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hybridplace
