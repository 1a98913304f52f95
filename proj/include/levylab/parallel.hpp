#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

namespace levylab {

/// Execution policy for Monte Carlo kernels. The serial loop is the reference
/// implementation; the OpenMP loop must reproduce it bit for bit, which holds
/// because every path owns its RNG stream and writes only its own slot.
enum class Exec { serial, parallel };

/// Calls f(i) for i in [0, n). Exceptions thrown by f are rethrown on the
/// calling thread (the first one wins).
template <class F> void for_each_index(std::size_t n, Exec exec, F &&f) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise summation in a fixed order: identical results for identical input
/// regardless of how the values were produced.
double pairwise_sum(std::span<const double> values);

} // namespace levylab
