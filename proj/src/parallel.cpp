#include "cantorlab/parallel.hpp"

#include <atomic>

namespace cantorlab {

namespace {
std::atomic<unsigned> g_threads{1};
}

unsigned thread_count() noexcept { return g_threads.load(std::memory_order_relaxed); }

void set_thread_count(unsigned n) noexcept {
  g_threads.store(n == 0 ? 1 : n, std::memory_order_relaxed);
}

}  // namespace cantorlab
