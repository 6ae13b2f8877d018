#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rieszlab/core.hpp"
#include "rieszlab/generators.hpp"

namespace rieszlab {

enum class EnergyRoute { PairSumMC, Rho2Quadrature, LatticeSeries };
std::string to_string(EnergyRoute route);

struct EnergyEntry {
  double R = 0.0;
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic routes
};

struct EnergyReport {
  EnergyRoute route = EnergyRoute::Rho2Quadrature;
  Kernel kernel = Kernel::log1d();
  std::vector<EnergyEntry> entries;  // sorted by R
  double extrapolated = 0.0;
  double extrapolation_error = 0.0;
  /// Standard error of `extrapolated` across replicas (Monte Carlo only).
  double extrapolated_std_error = 0.0;
  std::vector<double> richardson_iterates;
  /// Smallest C with |value(R_{i+1}) - value(R_i)| <= C / R_i.
  double rate_constant = 0.0;
  std::size_t replicas_used = 0;
  std::size_t singular_replicas = 0;
};

/// bb = double integral of g(x - y) over C_R x C_R, and pb(p) = integral of
/// g(p - y) over y in C_R (p relative to the cube center).
class BackgroundIntegrals {
 public:
  BackgroundIntegrals(const Kernel& kernel, double R);

  double R() const { return R_; }
  double bb() const { return bb_; }
  double pb(std::span<const double> p) const;

 private:
  Kernel kernel_;
  double R_;
  double bb_ = 0.0;
};

/// H^int_R: sum over ordered pairs p != q in the cube of g(p - q), minus
/// 2 sum_p pb(p), plus bb. The cube is C_R translated to `center` (the
/// window center by default). Coincident points raise SingularityError.
double hint_R(const PointConfiguration& config, double R, const Kernel& kernel,
              std::span<const double> center = {});
double hint_R(const PointConfiguration& config, const BackgroundIntegrals& background, const Kernel& kernel,
              std::span<const double> center = {});

/// Mean of H^int_R / R^d over replicas sampled on the largest window, with
/// nested cubes for the smaller R. The extrapolated value is the replica
/// mean of the least-squares intercept of a + b/R; singular replicas are
/// dropped and counted, and more than 1% of them aborts.
EnergyReport wint_monte_carlo(const ProcessModel& model, const Kernel& kernel, std::span<const double> R_list,
                              std::size_t n_replicas, std::uint64_t seed);

/// (1/R^d) times the integral over [-R, R]^d of g (rho_2 - 1) prod(R - |v_i|),
/// atoms included. Throws DivergenceError when g rho_2 is not integrable at 0.
double wint_rho2_at(const Rho2Analytic& rho2, const Kernel& kernel, double R);

EnergyReport wint_from_rho2(const Rho2Analytic& rho2, const Kernel& kernel, std::span<const double> R_list);

/// Large-R limit 2^d times the integral of g (rho_2 - 1) over [0, support]^d, for
/// compactly supported rho_2 - 1 without atoms.
double wint_rho2_limit(const Rho2Analytic& rho2, const Kernel& kernel);

/// Sum over k = 1..floor(R) of psi_R(k) minus the integral of psi_R over [0, R].
double lattice_series_value(const Kernel& kernel, double R);

EnergyReport wint_lattice_series(const Kernel& kernel, std::span<const double> R_list);

/// Integral of -log|v| (rho_2(v) - 1) over [-v_max, v_max]^d without tent
/// weight. Log kernels and decaying rho_2 - 1 only; the additive constant of
/// the Borodin-Serfaty energy is taken to be 0.
double wbs_energy(const Rho2Analytic& rho2, const Kernel& kernel, double v_max);

}  // namespace rieszlab
