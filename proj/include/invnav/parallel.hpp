#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace invnav {

// Runs fn(i) for i in [0, n) split into contiguous chunks, one per worker.
// Every index runs the same code path whatever the worker count, so outputs
// written per-index are bitwise identical to a serial loop.
template <class F>
void parallel_for_index(int n, int workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int w = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(w));
  const int chunk = (n + w - 1) / w;
  for (int t = 0; t < w; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace invnav
