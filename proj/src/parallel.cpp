#include "stochlab/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stochlab::parallel {

namespace {
std::atomic<int> configured{0};
}

void set_workers(int workers) { configured = workers < 0 ? 0 : workers; }

int workers() {
  const int w = configured.load();
  if (w > 0) return w;
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

}  // namespace stochlab::parallel
