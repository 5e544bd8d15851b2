/**
 * @file parallel.hpp
 * @brief Index-parallel map with a fixed, schedule-independent result layout.
 *
 * Workers only fill result slots; every reduction happens afterwards in index
 * order, so sums are bit-identical for any thread count.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vofc::parallel {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{1};
  return n;
}
inline thread_local bool inside_worker = false;
}  // namespace detail

/// Process-wide worker count used by grid evaluations (default 1).
inline void set_threads(int n) { detail::thread_setting().store(std::max(1, n)); }
inline int threads() { return detail::thread_setting().load(); }

/// Calls fn(i) for i in [0, n). Nested calls run serially on the calling worker.
/// The exception of the lowest failing index is rethrown.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads()), n);
  if (workers <= 1 || detail::inside_worker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto work = [&] {
    detail::inside_worker = true;
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
    detail::inside_worker = false;
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);
}

/// out[i] = fn(i), evaluated with for_each_index.
template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace vofc::parallel
