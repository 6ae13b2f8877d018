#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rieszlab/core.hpp"
#include "rieszlab/generators.hpp"

namespace rieszlab {

/// Density of the distance from a point to its k-th right neighbor.
struct NeighborDensity {
  int k = 1;
  double x_max = 0.0;
  int n_bins = 0;
  std::vector<double> centers;
  std::vector<double> values;
  std::vector<double> std_error;
  /// Point masses (location, mass) kept outside the histogram.
  std::vector<std::pair<double, double>> atoms;
  double total_mass = 0.0;
  double total_mass_error = 0.0;
  double mean_position = 0.0;
  std::size_t n_replicas = 0;

  double bin_width() const { return x_max / n_bins; }

  /// Exact lattice density: a unit atom at x = k.
  static NeighborDensity lattice(int k, double x_max, int n_bins);
};

/// Histogram of k-th neighbor gaps y - x for x, y in [-L/2, L/2]; each pair
/// adds 1 / ((L - (y - x)) * bin width). Ties are broken by index order.
NeighborDensity kth_neighbor_density(std::span<const PointConfiguration> samples, int k, double L,
                                     double x_max, int n_bins);

struct GapFunctionalValue {
  double s_exponent = 0.0;
  int k_max = 0;
  double value = 0.0;
  double std_error = 0.0;
  /// Estimate of the omitted k > k_max terms plus the histogram mass beyond x_max.
  double truncation_bound = 0.0;
  /// Fitted decay exponent p of the per-order terms ~ k^{-p}.
  double tail_exponent = 0.0;
};

/// Sum over k = 1..k_max of the integral of min((x - k)^2 / k^{s+2}, 1) rho_{2,k}(x).
/// `densities` must hold k = 1..k_max in order.
GapFunctionalValue crystallization_gap(std::span<const NeighborDensity> densities, double s_exponent, int k_max);

/// Per-gap relative entropy against exponential(1) gaps: 1 + integral of f log f.
double renewal_entropy_rate(const GapLaw& gap);

struct FreeEnergyEntry {
  double theta = 0.0;
  double wint = 0.0;
  double ers = 0.0;
  double f = 0.0;
  bool feasible = true;
};

struct FreeEnergyOptions {
  Rho2Options rho2;
  double golden_tolerance = 1e-3;  // relative width of the final golden-section bracket
};

struct FreeEnergyScan {
  double beta = 0.0;
  std::vector<FreeEnergyEntry> entries;
  double grid_argmin = 0.0;
  double argmin_theta = 0.0;
  double argmin_f = 0.0;
  /// Grid interval that was refined by golden-section search.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double refined_width = 0.0;
  bool wint_monotone = true;  // non-increasing in theta on the feasible grid
  bool ers_unimodal = true;   // decreasing up to theta = 1, increasing after
};

/// f(theta) = beta W^int(Gamma(theta) renewal) + ERS(Gamma(theta)).
FreeEnergyEntry free_energy_at(double beta, const Kernel& kernel, double theta, const FreeEnergyOptions& options = {});

FreeEnergyScan free_energy_scan(double beta, const Kernel& kernel, std::span<const double> theta_grid,
                                const FreeEnergyOptions& options = {});

}  // namespace rieszlab
