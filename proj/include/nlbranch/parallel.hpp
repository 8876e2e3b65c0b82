#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlbranch {

/// Runs body(worker, begin, end) over [0, n) in fixed-size chunks on
/// `threads` workers. Which worker handles a chunk is scheduling-dependent,
/// so bodies must write results by index only.
template <class Body>
void parallel_for_chunks(std::size_t n, unsigned threads, Body&& body, std::size_t chunk = 256) {
  threads = std::max(1u, threads);
  if (threads == 1 || n <= chunk) {
    if (n > 0) body(0u, std::size_t{0}, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&](unsigned id) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        body(id, begin, std::min(n, begin + chunk));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nlbranch
