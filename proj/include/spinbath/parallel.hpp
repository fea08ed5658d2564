#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace spinbath {

inline unsigned resolve_thread_count(int requested, std::size_t work_items) {
  std::size_t t;
  if (requested > 0) {
    t = static_cast<std::size_t>(requested);
  } else {
    const unsigned hw = std::thread::hardware_concurrency();
    t = hw ? hw : 1;
  }
  return static_cast<unsigned>(std::max<std::size_t>(
      1, std::min(t, std::max<std::size_t>(work_items, 1))));
}

/// Runs fn(begin, end) over a static block partition of [0, n).
///
/// Each index must be computable independently of every other index;
/// under that contract the result is identical for any thread count.
template <class Fn>
void parallel_for_blocks(std::size_t n, int threads, Fn&& fn) {
  const unsigned t = resolve_thread_count(threads, n);
  if (t <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned j = 0; j < t; ++j) {
    const std::size_t lo = n * j / t;
    const std::size_t hi = n * (j + 1) / t;
    pool.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spinbath
