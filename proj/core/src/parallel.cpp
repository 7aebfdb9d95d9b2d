#include "flameforge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#if defined(FLAMEFORGE_HAVE_OPENMP)
#include <omp.h>
#endif

namespace flameforge {

namespace {

int default_threads() {
  int n = 1;
#if defined(FLAMEFORGE_HAVE_OPENMP)
  n = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("FLAMEFORGE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // unparsable values are ignored
    }
  }
  return std::max(n, 1);
}

std::atomic<int>& threads_slot() {
  static std::atomic<int> slot{default_threads()};
  return slot;
}

}  // namespace

int thread_count() { return threads_slot().load(std::memory_order_relaxed); }

void set_thread_count(int n) { threads_slot().store(std::max(n, 1), std::memory_order_relaxed); }

double deterministic_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (values.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(0, static_cast<std::int64_t>(blocks), [&](std::int64_t b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(values.size(), lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[static_cast<std::size_t>(b)] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace flameforge
