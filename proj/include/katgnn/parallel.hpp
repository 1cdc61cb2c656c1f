#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace katgnn {

// Runs fn(i) for i in [0, n) on up to `threads` workers with strided
// assignment. Callers own any cross-item determinism (write results into
// per-index slots and reduce sequentially afterwards).
template <class Fn>
void parallel_for(size_t n, int threads, const Fn& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t workers = std::min(static_cast<size_t>(threads), n);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace katgnn
