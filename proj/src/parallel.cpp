#include "evac/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evac {

int configure_threads() {
#ifdef _OPENMP
  if (const char* env = std::getenv("EVACSIM_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0 && cap < omp_get_max_threads()) omp_set_num_threads(cap);
    } catch (const std::exception&) {
      // unparsable value: keep the runtime default
    }
  }
#endif
  return worker_count();
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace evac
