#pragma once

// Every hot kernel in the library comes in two flavours selected by Exec:
// a plain sequential loop kept as the reference, and an OpenMP version.
// Parallel reductions accumulate fixed-size blocks and then add the block
// sums in index order, so results do not depend on the thread count.

#include <cstddef>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace rlab {

enum class Exec { serial, parallel };

inline void set_threads(int n) {
#if defined(_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline constexpr std::size_t kReduceBlock = 4096;

/// Sum term(i) for i in [0, n). Serial: one running sum. Parallel: blocked,
/// deterministic in the number of threads.
template <class Term>
double reduce_sum(std::size_t n, Term&& term, Exec exec) {
  if (exec == Exec::serial) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

/// out[i] = fn(i) for i in [0, n).
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, Exec exec) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace rlab
