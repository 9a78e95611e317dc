#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

// Thin wrapper over OpenMP so every kernel also has an obvious serial path:
// threads == 1 runs the plain loop (the reference used by the equivalence
// tests), threads == 0 lets the runtime pick, threads > 1 forces a team size.
// Results must not depend on the partition; kernels that reduce use
// per-thread accumulators merged in thread order.

namespace satrrm {

inline int resolve_threads(int threads) {
  if (threads == 1) return 1;
#ifdef _OPENMP
  return threads <= 0 ? omp_get_max_threads() : threads;
#else
  return 1;
#endif
}

template <class F>
void parallel_for(std::int64_t n, int threads, F&& f) {
  const int t = resolve_threads(threads);
  if (t <= 1) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(t)
  for (std::int64_t i = 0; i < n; ++i) f(i);
#else
  for (std::int64_t i = 0; i < n; ++i) f(i);
#endif
}

// Static partition of [0,n) into exactly `parts` contiguous chunks; chunk p is
// [chunk_begin(n,parts,p), chunk_begin(n,parts,p+1)). Used where per-chunk
// results are merged in chunk order to keep floating-point sums reproducible.
inline std::int64_t chunk_begin(std::int64_t n, int parts, int p) {
  return n * p / parts;
}

template <class F>
void parallel_chunks(std::int64_t n, int threads, F&& f) {  // f(part, begin, end)
  const int t = resolve_threads(threads);
  if (t <= 1) {
    f(0, std::int64_t{0}, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel num_threads(t)
  {
    const int p = omp_get_thread_num();
    const int np = omp_get_num_threads();
    f(p, chunk_begin(n, np, p), chunk_begin(n, np, p + 1));
  }
#else
  f(0, std::int64_t{0}, n);
#endif
}

}  // namespace satrrm
