#include "twr/parallel.hpp"

#include <cstdlib>
#include <string>

namespace twr {

int worker_count() {
#ifdef _OPENMP
  int fallback = omp_get_max_threads();
#else
  int fallback = 1;
#endif
  const char* env = std::getenv("TWRSIM_THREADS");
  if (env != nullptr) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
      // ignore malformed values, fall through to the OpenMP default
    }
  }
  return fallback;
}

}  // namespace twr
