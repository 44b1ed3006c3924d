#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace swos {

// Runs body(i) for i in [0, n). Each index owns its output slot, so the
// result is identical for any worker count. The first exception thrown by
// any worker is rethrown on the calling thread after the join.
inline void parallel_for(long n, int n_threads,
                         const std::function<void(long)>& body) {
  if (n <= 0) return;
  if (n_threads <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  int workers = int(std::min<long>(n_threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (long i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Pairwise (cascade) summation: deterministic and independent of how the
// values were produced.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo,
                           std::size_t hi) {
  std::size_t n = hi - lo;
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + n / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v, 0, v.size());
}

} // namespace swos
