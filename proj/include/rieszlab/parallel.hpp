#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

namespace rieszlab {

/// Caps the number of worker threads used by replica loops (0 = runtime default).
void set_thread_limit(int threads);
int thread_limit();

/// Evaluates fn(i) for i in [0, n) in parallel; results are stored by index,
/// so every later reduction sees the same order whatever the thread count.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_limit())
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Recursive pairwise summation.
double pairwise_sum(std::span<const double> xs);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

/// Sample mean, sample standard deviation and standard error of the mean.
MeanStderr mean_stderr(std::span<const double> xs);

}  // namespace rieszlab
