#include "dhawkes/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dhawkes {

namespace {

std::size_t threads_from_env() {
  if (const char* env = std::getenv("DHAWKES_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (...) {
    }
  }
  return 1;
}

std::atomic<std::size_t>& thread_setting() {
  static std::atomic<std::size_t> value{threads_from_env()};
  return value;
}

}  // namespace

std::size_t default_threads() { return thread_setting().load(); }

void set_default_threads(std::size_t threads) { thread_setting().store(threads == 0 ? 1 : threads); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace dhawkes
