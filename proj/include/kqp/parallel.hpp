#ifndef KQP_PARALLEL_HPP
#define KQP_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace kqp {

// Runs fn(i) for i in [0, n) on up to `threads` workers.  Results must be
// written to per-index slots; no other shared state.
inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min<int>(threads, static_cast<int>(n));
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace kqp

#endif
