#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace szego {

/// Degree of parallelism; 0 means one worker per hardware thread.
struct Exec {
  unsigned threads = 0;

  [[nodiscard]] unsigned workers() const {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return threads == 0 ? hw : threads;
  }
};

/// Calls body(i) for i in [0, n). Work is claimed dynamically, but callers
/// write results by index so output never depends on scheduling.
template <class Body>
void parallelFor(std::size_t n, Exec exec, Body&& body) {
  const unsigned w = static_cast<unsigned>(std::min<std::size_t>(exec.workers(), n));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace szego
