#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "wordmap/common.hpp"

namespace wordmap {

inline unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(begin, end) over a static partition of [0, n). Results must not
// depend on the partition; callers keep per-index outputs or merge with an
// order-free reduction. The first exception thrown by any chunk is rethrown.
template <typename Fn>
void parallel_for(Index n, Fn&& fn, unsigned threads = 0) {
  if (n <= 0) return;
  unsigned workers = resolve_thread_count(threads);
  workers = static_cast<unsigned>(
      std::min<Index>(static_cast<Index>(workers), n));
  if (workers <= 1) {
    fn(Index{0}, n);
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (n + static_cast<Index>(workers) - 1) /
                      static_cast<Index>(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace wordmap
