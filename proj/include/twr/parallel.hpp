#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace twr {

/// Worker count for parallel loops: TWRSIM_THREADS when set, otherwise
/// the OpenMP default.
int worker_count();

/// Index-parallel loop. Every index writes only its own output slot, so
/// results are identical between the serial and the OpenMP path. The
/// first exception thrown by any body is rethrown after the loop.
template <typename Body>
void parallel_for_index(std::size_t n, bool parallel, Body&& body) {
#ifdef _OPENMP
  if (parallel && n > 1) {
    std::exception_ptr error = nullptr;
    const int threads = worker_count();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(twr_parallel_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  (void)parallel;
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace twr
