#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace smi {

// Fixed-size pool of workers used for index-parallel loops. Work items are
// claimed dynamically but results are always written to per-index slots, so
// the outcome of a loop never depends on the number of workers.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned threads = 1) : threads_(std::max(1u, threads)) {}

  unsigned size() const { return threads_; }

  template <typename Fn>
  void parallel_for(std::size_t n, Fn&& fn) const {
    if (n == 0) return;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, n));
    if (workers == 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(n);
          return;
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
      body();
    }
    if (failure) std::rethrow_exception(failure);
  }

 private:
  unsigned threads_;
};

}  // namespace smi
