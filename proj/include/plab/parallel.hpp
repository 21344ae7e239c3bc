#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plab {

/// Worker count used by the samplers; 0 means hardware concurrency.
std::size_t worker_threads();
void set_worker_threads(std::size_t n);

/// Calls body(k) for k in [0, n) over contiguous chunks. Each index must write
/// only to its own output slot so the result does not depend on scheduling.
/// The first exception thrown by any chunk is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t threads = std::min(worker_threads(), n);
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t k = begin; k < end; ++k) body(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace plab
