#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rieszlab/core.hpp"
#include "rieszlab/rng.hpp"

namespace rieszlab {

/// Mean-one gap distribution of a one-dimensional renewal process.
struct GapLaw {
  enum class Kind { Exponential, Gamma, UniformHat };

  Kind kind = Kind::Exponential;
  double shape = 1.0;  // Gamma shape theta (rate theta, mean 1)
  int k = 0;           // UniformHat: law of 1 + V' - V, V, V' ~ U[-1/k, 1/k]

  static GapLaw exponential();
  static GapLaw gamma(double theta);
  static GapLaw uniform_hat(int k);

  double pdf(double x) const;
  double variance() const;
  double stddev() const;
  /// Closed support [lo, hi] (hi may be +inf).
  std::pair<double, double> support() const;
  double draw(Engine& rng) const;
  /// Draw from the size-biased law x f(x) (mean one).
  double draw_size_biased(Engine& rng) const;
  /// Treat Exponential as Gamma(1) where a shape is needed.
  double gamma_shape() const;
  std::string describe() const;
};

struct ProcessModel {
  enum class Kind { Poisson, Lattice, BernoulliBlock, VibratingLattice, Renewal };

  Kind kind = Kind::Poisson;
  int d = 1;
  int k = 0;  // block side (BernoulliBlock) or vibration order (VibratingLattice)
  GapLaw gap; // Renewal only

  static ProcessModel poisson(int d);
  static ProcessModel lattice(int d);
  static ProcessModel bernoulli_block(int d, int k);
  static ProcessModel vibrating_lattice(int k);
  static ProcessModel renewal(GapLaw gap);

  std::string descriptor() const;
};

/// Draws one configuration in `window`. Every variant has intensity one and
/// is stationary: the periodic constructions are averaged over a uniform
/// shift of their fundamental domain, and renewal processes start from the
/// equilibrium forward-recurrence law.
PointConfiguration sample(const ProcessModel& model, const Window& window, Seed seed);

/// Two-point correlation rho_2(v) = rho_2(0, v) of a stationary intensity-one
/// process: an absolutely continuous part plus, for the lattice, unit atoms
/// at the nonzero integer points.
struct Rho2Analytic {
  int d = 1;
  std::function<double(std::span<const double>)> density;
  bool lattice_atoms = false;
  /// Beyond this sup-norm radius the continuous part equals 1 and there are no atoms.
  double support_radius = std::numeric_limits<double>::infinity();
  /// rho_2 - 1 tends to 0 at infinity (false for lattice-like processes).
  bool decays = true;
  /// The density depends on |v| only.
  bool radial = false;
  /// density(v) ~ c |v|^alpha as v -> 0.
  double small_distance_exponent = 0.0;
  /// Sorted points of (0, r] where the one-dimensional density is not smooth.
  std::function<std::vector<double>(double r)> breakpoints;
  std::string label;

  /// One-dimensional convenience accessor for the continuous part.
  double operator()(double v) const;
  /// Atom locations in (0, r] (one-dimensional).
  std::vector<double> atoms_within(double r) const;
};

struct Rho2Options {
  double h = 1.0 / 256.0;  // convolution grid step
  double v_max = 32.0;     // convolution grid extent
  double tail_tol = 1e-10; // stop the convolution series below this in-grid mass
};

Rho2Analytic rho2_analytic(const ProcessModel& model, const Rho2Options& options = {});

/// Renewal rho_2 = sum_j f^{*j} on a uniform grid by iterated discrete convolution.
struct Rho2Grid {
  double h = 0.0;
  std::vector<double> values;  // rho_2(i h), i = 0 .. n
  int terms = 0;               // convolution powers kept
  double tail_deviation = 0.0; // max |rho_2 - 1| over the last unit of the grid
};
Rho2Grid renewal_rho2_by_convolution(const GapLaw& gap, const Rho2Options& options = {});

/// Exact sum of Gamma(j theta, rate theta) densities.
double gamma_renewal_rho2(double theta, double x);

/// The hypothetical hardcore candidate rho_2 = 1 - 1_B, B the unit-volume ball.
Rho2Analytic hardcore_candidate(int d);
double unit_ball_radius(int d);

/// Triangular density of V' - V, V, V' ~ U[-1/k, 1/k].
double vibration_hat(int k, double x);

}  // namespace rieszlab
