#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace dhawkes {

/// Worker count used when callers pass 0. Initialised from DHAWKES_THREADS,
/// falling back to 1.
std::size_t default_threads();
void set_default_threads(std::size_t threads);

inline std::size_t resolve_threads(std::size_t threads) {
  return threads == 0 ? default_threads() : threads;
}

/// Runs body(i) for i in [0, n). Indices are split into contiguous static
/// ranges; results must be written by index so output never depends on the
/// worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t threads = 0) {
  threads = std::min(resolve_threads(threads), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t begin = n * w / threads;
    const std::size_t end = n * (w + 1) / threads;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation; the order depends only on the length.
double pairwise_sum(std::span<const double> values);

}  // namespace dhawkes
