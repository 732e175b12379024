#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

#include "stochlab/stats.hpp"

namespace stochlab::parallel {

/// Worker cap for replica loops; 0 means "all available cores".
void set_workers(int workers);
int workers();

/// Serial reference for map_replicas. `fn(replica, row)` fills one row.
template <class Fn>
SampleTable map_replicas_serial(std::size_t count, std::size_t width, Fn&& fn) {
  SampleTable table(count, width);
  for (std::size_t r = 0; r < count; ++r) fn(r, table.row(r));
  return table;
}

/// OpenMP replica loop. Every replica writes only its own row, so the table
/// (and any pairwise reduction over it) is identical to the serial result
/// for every worker count. The first exception thrown by `fn` is rethrown.
template <class Fn>
SampleTable map_replicas(std::size_t count, std::size_t width, Fn&& fn) {
  SampleTable table(count, width);
  std::exception_ptr failure;
  std::mutex guard;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers())
  for (long long r = 0; r < n; ++r) {
    try {
      fn(static_cast<std::size_t>(r), table.row(static_cast<std::size_t>(r)));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

}  // namespace stochlab::parallel
