#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace brwre::parallel {

/// True inside an active OpenMP region; inner loops then stay serial so that
/// replica-level parallelism is not oversubscribed.
inline bool in_parallel_region() noexcept {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return true;
#endif
}

inline int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace brwre::parallel
