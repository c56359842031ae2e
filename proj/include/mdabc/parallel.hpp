#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mdabc {

// Runs f(i) for i in [0, n) across at most `threads` std::threads, splitting
// the range into contiguous chunks.  Each work item must touch only state it
// owns (slot i of an output vector, its own RngStream), so the partition can
// never influence results -- that discipline, not luck, is what makes runs
// bitwise identical for any thread count.  The first exception thrown by a
// worker is rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
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

// Default worker count for user-facing entry points.
inline unsigned hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace mdabc
