#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace edgefem::parallel {

namespace detail {
inline std::atomic<int>& worker_setting() {
  static std::atomic<int> value{0};
  return value;
}
}  // namespace detail

/// Number of workers used by batched kernels. Resolution order: explicit
/// set_workers(), the EDGEFEM_WORKERS environment variable, hardware threads.
inline int workers() {
  int n = detail::worker_setting().load();
  if (n > 0) return n;
  if (const char* env = std::getenv("EDGEFEM_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_workers(int n) { detail::worker_setting().store(n > 0 ? n : 0); }

/// Split [0, n) into contiguous ranges and run fn(begin, end) on each.
/// Ranges are disjoint, so kernels that write per-item slots produce results
/// independent of the worker count.
inline void for_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                       std::size_t min_chunk = 4096) {
  const std::size_t w = std::min<std::size_t>(workers(), (n + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
  if (w <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace edgefem::parallel
