#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace jacobi2p {

/// Runs f(i) for i in [begin, end) on up to `threads` workers.  Results must
/// be written to disjoint slots; no ordering guarantees.
template <typename F>
void parallel_for(int begin, int end, int threads, F&& f) {
  if (end <= begin) return;
  const int n_workers =
      std::max(1, std::min(threads, static_cast<int>(std::thread::hardware_concurrency())));
  if (n_workers == 1 || end - begin == 1) {
    for (int i = begin; i < end; ++i) f(i);
    return;
  }
  std::atomic<int> next{begin};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int k = 0; k < n_workers; ++k) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < end; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace jacobi2p
