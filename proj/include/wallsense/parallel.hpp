#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wallsense::detail {

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on worker
/// threads. The first exception thrown by any chunk is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t max_threads = 0) {
  if (n == 0) return;
  std::size_t workers = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace wallsense::detail
