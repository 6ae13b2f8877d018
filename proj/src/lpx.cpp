#include "rieszlab/lpx.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "rieszlab/error.hpp"
#include "rieszlab/parallel.hpp"

namespace rieszlab {

namespace {

// The FFTW planner is not reentrant; execution of a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class DctPlan {
 public:
  explicit DctPlan(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_real(n);
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in_, out_, FFTW_REDFT11, FFTW_ESTIMATE);
  }
  ~DctPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  DctPlan(const DctPlan&) = delete;
  DctPlan& operator=(const DctPlan&) = delete;

  void apply(std::span<const double> x, std::vector<double>& y) {
    std::copy(x.begin(), x.end(), in_);
    fftw_execute(plan_);
    y.assign(out_, out_ + n_);
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  double* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

void check_values(std::span<const double> values, const Discretization& disc) {
  if (values.size() != disc.n) throw ArgumentError("candidate length does not match the discretization");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("candidate values must be finite");
}

void check_kernel(const Kernel& kernel) {
  if (kernel.dim() != 1) throw ArgumentError("lpx: one-dimensional kernels only");
}

}  // namespace

Discretization Discretization::make(double v_max, double h, double R, std::size_t oversample) {
  if (oversample < 1) throw ArgumentError("discretization: oversample must be >= 1");
  if (!(v_max > 0.0) || !(h > 0.0) || !(R > 0.0)) throw ArgumentError("discretization: v_max, h and R must be positive");
  const double cells = v_max / h;
  const auto n = static_cast<std::size_t>(std::llround(cells));
  if (n < 1 || std::abs(cells - static_cast<double>(n)) > 1e-9 * cells)
    throw ArgumentError("discretization: v_max must be a multiple of h");
  if (R < v_max) throw ArgumentError("discretization: R must be at least v_max");
  return Discretization{v_max, n, R, oversample};
}

std::vector<double> dct_iv(std::span<const double> x) {
  if (x.empty()) return {};
  DctPlan plan(x.size());
  std::vector<double> y;
  plan.apply(x, y);
  return y;
}

std::vector<double> cosine_transform(std::span<const double> values, const Discretization& disc) {
  if (values.size() != disc.n) throw ArgumentError("cosine_transform: length does not match the discretization");
  std::vector<double> padded(disc.n_freq(), 0.0);
  std::copy(values.begin(), values.end(), padded.begin());
  auto y = dct_iv(padded);
  for (double& v : y) v *= disc.h();
  return y;
}

std::vector<double> objective_weights(const Discretization& disc, const Kernel& kernel) {
  check_kernel(kernel);
  const double h = disc.h();
  std::vector<double> c(disc.n);
  for (std::size_t j = 0; j < disc.n; ++j) {
    const double a = static_cast<double>(j) * h, b = a + h;
    const double g = kernel.primitive(b) - kernel.primitive(a);
    const double m = kernel.first_moment_primitive(b) - kernel.first_moment_primitive(a);
    c[j] = 2.0 * (g - m / disc.R);
  }
  return c;
}

namespace {

CandidateT2 evaluate_with(std::span<const double> values, const Discretization& disc,
                          std::span<const double> weights, std::span<const double> transform, bool neutrality) {
  CandidateT2 out;
  out.values.assign(values.begin(), values.end());
  out.R = disc.R;
  std::vector<double> terms(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) terms[j] = weights[j] * values[j];
  out.objective = pairwise_sum(terms);

  double dmin = std::numeric_limits<double>::infinity();
  for (double v : values) dmin = std::min(dmin, v);
  out.direct_violation = std::max(0.0, -1.0 - dmin);
  double fmin = std::numeric_limits<double>::infinity();
  for (double v : transform) fmin = std::min(fmin, v);
  out.fourier_violation = std::max(0.0, -1.0 - fmin);

  const double h = disc.h();
  double mass = 0.0, lipschitz = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    mass += 2.0 * h * values[j];
    lipschitz += 4.0 * std::numbers::pi * h * disc.cell_center(j) * std::abs(values[j]);
  }
  out.neutrality_residual = mass + 1.0;
  // Half the frequency spacing times the Lipschitz constant of the transform.
  out.fourier_gap_bound = lipschitz / (4.0 * static_cast<double>(disc.oversample) * disc.v_max);
  out.feasible_direct = out.direct_violation <= kLpFeasibilityTol;
  out.feasible_fourier = out.fourier_violation <= kLpFeasibilityTol;
  out.max_violation = std::max(out.direct_violation, out.fourier_violation);
  if (neutrality) out.max_violation = std::max(out.max_violation, std::abs(out.neutrality_residual));
  return out;
}

}  // namespace

CandidateT2 evaluate_candidate(std::span<const double> values, const Discretization& disc, const Kernel& kernel,
                               bool neutrality) {
  check_kernel(kernel);
  check_values(values, disc);
  const auto weights = objective_weights(disc, kernel);
  const auto transform = cosine_transform(values, disc);
  return evaluate_with(values, disc, weights, transform, neutrality);
}

std::vector<double> hardcore_values(const Discretization& disc) {
  const double h = disc.h();
  std::vector<double> t(disc.n, 0.0);
  for (std::size_t j = 0; j < disc.n; ++j) {
    const double a = static_cast<double>(j) * h;
    const double overlap = std::clamp(0.5 - a, 0.0, h);
    t[j] = -overlap / h;
  }
  return t;
}

double StepSchedule::step(std::size_t t, double scale) const {
  const double base = initial > 0.0 ? initial : scale;
  if (kind == Kind::Constant) return base;
  return base / std::sqrt(static_cast<double>(t) + 1.0);
}

CandidateT2 minimize_t2(const Discretization& disc, const Kernel& kernel, const SolverOptions& options) {
  check_kernel(kernel);
  if (options.iterations < 1) throw ArgumentError("minimize_t2: iterations must be >= 1");
  const bool neutral = options.neutrality < 0 ? kernel.is_log() : options.neutrality == 1;
  const std::size_t n = disc.n;
  const std::size_t N = disc.n_freq();
  const double h = disc.h();
  auto c = objective_weights(disc, kernel);
  DctPlan dct(N);
  std::vector<double> buf;

  // Iterates live on the padded grid of length N; the tail j >= n is a
  // subspace constraint. Q = DCT-IV / sqrt(2N) is orthonormal and the Fourier
  // constraint reads Q T >= lb.
  const double qscale = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  const double lb = -1.0 / (h * std::sqrt(2.0 * static_cast<double>(N)));
  auto project_box = [](std::vector<double>& x) {
    for (double& v : x) v = std::max(v, -1.0);
  };
  auto project_fourier = [&](std::vector<double>& x) {
    dct.apply(x, buf);
    bool active = false;
    for (double& v : buf) {
      v *= qscale;
      if (v < lb) {
        v = lb;
        active = true;
      }
    }
    if (!active) return;
    dct.apply(buf, x);
    for (double& v : x) v *= qscale;
  };
  auto project_support = [&](std::vector<double>& x) { std::fill(x.begin() + static_cast<std::ptrdiff_t>(n), x.end(), 0.0); };
  auto project_plane = [&](std::vector<double>& x) {
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) mass += 2.0 * h * x[j];
    const double shift = (mass + 1.0) / (4.0 * h * h * static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) x[j] -= shift * 2.0 * h;
  };
  auto evaluate = [&](const std::vector<double>& x) {
    std::vector<double> tr;
    dct.apply(x, tr);
    for (double& v : tr) v *= h;
    return evaluate_with(std::span<const double>(x).first(n), disc, c, tr, neutral);
  };

  // Dykstra's cyclic projection onto the intersection of the constraint sets.
  auto project = [&](std::vector<double> x) {
    std::vector<std::function<void(std::vector<double>&)>> sets{project_box, project_fourier, project_support};
    if (neutral) sets.emplace_back(project_plane);
    std::vector<std::vector<double>> incr(sets.size(), std::vector<double>(N, 0.0));
    std::vector<double> y = std::move(x), z(N), prev;
    for (std::size_t it = 0; it < options.dykstra_iterations; ++it) {
      prev = y;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        auto& p = incr[k];
        for (std::size_t j = 0; j < N; ++j) z[j] = y[j] + p[j];
        sets[k](z);
        for (std::size_t j = 0; j < N; ++j) p[j] = y[j] + p[j] - z[j];
        std::swap(y, z);
      }
      double change = 0.0;
      for (std::size_t j = 0; j < N; ++j) change = std::max(change, std::abs(y[j] - prev[j]));
      if (change < options.projection_tol) break;
      if (it % 16 == 15 && evaluate(y).max_violation < options.projection_tol) break;
    }
    return y;
  };

  // Strictly feasible anchor: 0, or a shallow neutral well when the mass is pinned.
  std::vector<double> anchor(N, 0.0);
  if (neutral) {
    const double L = std::min(4.0, std::floor(0.5 * disc.v_max / h) * h);
    for (std::size_t j = 0; j < n; ++j)
      anchor[j] = -std::clamp(L - static_cast<double>(j) * h, 0.0, h) / h / (2.0 * L);
  }
  std::vector<double> anchor_tr;
  dct.apply(anchor, anchor_tr);
  for (double& v : anchor_tr) v *= h;

  // Smallest move toward the anchor that satisfies every lower bound exactly.
  auto restore = [&](std::vector<double>& x) {
    project_support(x);
    if (neutral) project_plane(x);
    std::vector<double> tr;
    dct.apply(x, tr);
    double lambda = 0.0;
    auto need = [&](double xv, double av) {
      if (xv >= -1.0) return;
      lambda = std::max(lambda, (-1.0 - xv) / std::max(av - xv, 1e-300));
    };
    for (std::size_t j = 0; j < n; ++j) need(x[j], anchor[j]);
    for (std::size_t m = 0; m < N; ++m) need(h * tr[m], anchor_tr[m]);
    lambda = std::min(1.0, lambda * (1.0 + 1e-12));
    for (std::size_t j = 0; j < N; ++j) x[j] = (1.0 - lambda) * x[j] + lambda * anchor[j];
    return lambda;
  };

  const std::vector<double> zero(N, 0.0);
  auto hard = hardcore_values(disc);
  hard.resize(N, 0.0);
  auto best = evaluate(hard);
  best.start = "hardcore";
  const auto poisson = evaluate(zero);
  if (poisson.max_violation <= kLpFeasibilityTol && poisson.objective < best.objective) {
    best = poisson;
    best.start = "poisson";
  }
  if (best.max_violation > 1e-6)
    throw ConvergenceError("minimize_t2: no feasible reference candidate to start from");
  const std::string start = best.start;

  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::abs(v));
  const double scale = cmax > 0.0 ? 1.0 / cmax : 1.0;
  std::vector<double> x = best.values, best_objective_trace, violation_trace;
  x.resize(N, 0.0);
  for (std::size_t t = 0; t < options.iterations; ++t) {
    const double eta = options.schedule.step(t, scale);
    for (std::size_t j = 0; j < n; ++j) x[j] -= eta * c[j];
    x = project(std::move(x));
    violation_trace.push_back(evaluate(x).max_violation);
    restore(x);
    auto cand = evaluate(x);
    if (cand.max_violation <= 1e-9 && cand.objective < best.objective) best = std::move(cand);
    best_objective_trace.push_back(best.objective);
  }
  best.best_objective_trace = std::move(best_objective_trace);
  best.violation_trace = std::move(violation_trace);
  best.iterations = options.iterations;
  best.start = start;
  return best;
}

}  // namespace rieszlab
