#ifndef VEM_PARALLEL_HPP
#define VEM_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace vem {

/// Run f(i) for i in [0, n) on up to n_threads threads. Work items must be
/// independent; results land in caller-owned per-index slots, so the
/// outcome is identical for any thread count.
template <typename F>
void parallel_for(int n, F&& f, int n_threads) {
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  const int chunk = (n + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&f, begin, end] {
      for (int i = begin; i < end; ++i) f(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace vem

#endif
