#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flameforge {

/// Number of worker threads used by data-parallel loops. Honors the
/// FLAMEFORGE_THREADS environment variable on first use.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [begin, end). Iterations must write disjoint data.
template <class Body>
void parallel_for(std::int64_t begin, std::int64_t end, Body&& body) {
#if defined(FLAMEFORGE_HAVE_OPENMP)
  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && end - begin > 64)
  for (std::int64_t i = begin; i < end; ++i) body(i);
#else
  for (std::int64_t i = begin; i < end; ++i) body(i);
#endif
}

/// Sum with a fixed association order independent of the thread count:
/// fixed-size blocks are summed separately, then combined left to right.
double deterministic_sum(std::span<const double> values);

}  // namespace flameforge
