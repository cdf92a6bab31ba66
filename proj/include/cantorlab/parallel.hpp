#pragma once

// Minimal static-partition parallel loop. Each index is processed exactly
// once and results are written by index, so output never depends on the
// schedule. Worker threads inherit the caller's default precision.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "cantorlab/bigfloat.hpp"

namespace cantorlab {

/// Number of worker threads used by parallel_for (at least 1).
unsigned thread_count() noexcept;
void set_thread_count(unsigned n) noexcept;

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const Precision bits = default_precision();
  std::exception_ptr first_error;
  std::size_t first_index = count;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      ScopedPrecision scope(bits);
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          // Report the lowest failing index so errors are schedule-independent.
          std::lock_guard<std::mutex> lock(error_mutex);
          if (i < first_index) {
            first_index = i;
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cantorlab
