#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rieszlab/core.hpp"

namespace rieszlab {

/// Even functions on [-v_max, v_max] stored on the cells [j h, (j + 1) h],
/// j = 0..n-1, of the positive half. The cosine transform of the step
/// function, zero-padded to [0, oversample * v_max], is sampled at
/// xi_m = (m + 1/2) / (2 oversample v_max), m < oversample * n, where it is
/// exactly h times a DCT-IV of the padded values.
struct Discretization {
  double v_max = 8.0;
  std::size_t n = 512;
  double R = 8.0;  // tent parameter of the objective
  std::size_t oversample = 4;

  static Discretization make(double v_max, double h, double R, std::size_t oversample = 4);

  double h() const { return v_max / static_cast<double>(n); }
  std::size_t n_freq() const { return oversample * n; }
  double cell_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * h(); }
  double frequency(std::size_t m) const {
    return (static_cast<double>(m) + 0.5) / (2.0 * static_cast<double>(oversample) * v_max);
  }
};

/// Unnormalized DCT-IV (FFTW REDFT11): y_m = 2 sum_j x_j cos(pi (j + 1/2)(m + 1/2) / n).
/// Applying it twice multiplies by 2n.
std::vector<double> dct_iv(std::span<const double> x);

/// Fourier transform of the even step function with the given cell values,
/// midpoint rule per cell, on the frequency grid of `disc`.
std::vector<double> cosine_transform(std::span<const double> values, const Discretization& disc);

/// Objective weights c_j = 2 * integral over cell j of g(v) (1 - v / R) dv.
std::vector<double> objective_weights(const Discretization& disc, const Kernel& kernel);

struct CandidateT2 {
  std::vector<double> values;
  double objective = 0.0;
  bool feasible_direct = true;
  bool feasible_fourier = true;
  double max_violation = 0.0;      // over both constraint families (and neutrality when imposed)
  double direct_violation = 0.0;
  double fourier_violation = 0.0;
  double neutrality_residual = 0.0;  // integral of T_2 plus one
  /// Bound on how far the transform can dip between frequency samples.
  double fourier_gap_bound = 0.0;
  double R = 0.0;
  // Solver diagnostics (empty for plain evaluation).
  std::vector<double> best_objective_trace;
  std::vector<double> violation_trace;
  std::size_t iterations = 0;
  std::string start;  // reference candidate used as warm start
};

/// Feasibility tolerance used for the boolean flags.
inline constexpr double kLpFeasibilityTol = 1e-9;

CandidateT2 evaluate_candidate(std::span<const double> values, const Discretization& disc, const Kernel& kernel,
                               bool neutrality = false);

/// -1 on the cells inside the unit-volume interval [-1/2, 1/2], 0 elsewhere.
std::vector<double> hardcore_values(const Discretization& disc);

struct StepSchedule {
  enum class Kind { Constant, InverseSqrt };
  Kind kind = Kind::InverseSqrt;
  double initial = 0.0;  // 0 selects 1 / max |c_j|
  double step(std::size_t t, double scale) const;
};

struct SolverOptions {
  std::size_t iterations = 200;
  StepSchedule schedule;
  std::size_t dykstra_iterations = 100;
  double projection_tol = 1e-10;
  /// Impose integral T_2 = -1. Defaults to on for logarithmic kernels, where
  /// the problem is unbounded below without it.
  int neutrality = -1;  // -1 auto, 0 off, 1 on
};

/// Projected gradient descent on the linear objective. Each step is followed
/// by a truncated Dykstra projection onto {T >= -1}, {T^ >= -1}, the support
/// [0, v_max] and (when imposed) the neutrality hyperplane, then by the
/// shortest move toward a strictly feasible anchor that makes the iterate
/// exactly feasible. Starts from the better of the Poisson and hardcore
/// references and returns the best feasible iterate.
CandidateT2 minimize_t2(const Discretization& disc, const Kernel& kernel, const SolverOptions& options = {});

}  // namespace rieszlab
