#include "rieszlab/parallel.hpp"

#include <cmath>

namespace rieszlab {

namespace {
int& thread_cap() {
  static int cap = 0;
  return cap;
}
}  // namespace

void set_thread_limit(int threads) { thread_cap() = threads < 0 ? 0 : threads; }

int thread_limit() { return thread_cap() > 0 ? thread_cap() : omp_get_max_threads(); }

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = xs.size();
  if (xs.empty()) return out;
  out.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  const double var = pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
  out.stddev = std::sqrt(var);
  out.std_error = out.stddev / std::sqrt(static_cast<double>(xs.size()));
  return out;
}

}  // namespace rieszlab
