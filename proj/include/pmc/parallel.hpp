#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace pmc {

/// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop (the
/// reference semantics); otherwise contiguous chunks go to worker threads.
/// Callers write results into disjoint preallocated slots, so the parallel
/// run reproduces the reference output exactly.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  const std::size_t chunk = (n + nw - 1) / nw;
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pmc
