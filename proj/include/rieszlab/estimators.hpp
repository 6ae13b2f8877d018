#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rieszlab/core.hpp"
#include "rieszlab/generators.hpp"

namespace rieszlab {

struct BinSpec {
  enum class Mode { Signed1D, Radial };
  double v_max = 1.0;
  int n_bins = 1;
  Mode mode = Mode::Signed1D;

  double lower() const { return mode == Mode::Signed1D ? -v_max : 0.0; }
  double width() const { return (v_max - lower()) / n_bins; }
  double center(int i) const { return lower() + (i + 0.5) * width(); }
};

/// Binned estimate of rho_2(v) - 1 averaged over replicas.
struct CorrelationEstimate {
  int d = 1;
  BinSpec bins;
  std::vector<double> centers;
  std::vector<double> values;
  std::vector<double> std_error;
  std::size_t n_replicas = 0;
};

/// Each ordered pair (x, y) of a replica adds 1 / (bin volume * prod(R - |v_i|))
/// to the bin of v = x - y, which is unbiased for the bin average of rho_2.
CorrelationEstimate estimate_rho2(std::span<const PointConfiguration> samples, const BinSpec& bins);

struct VarianceEntry {
  double R = 0.0;
  double mean_sq = 0.0;  // mean of D_R^2
  double std_error = 0.0;
};

struct VarianceCurve {
  std::vector<VarianceEntry> entries;
  double fitted_exponent = 0.0;
  double exponent_ci = 0.0;  // 95% half-width of the log-log slope
  double fitted_log_prefactor = 0.0;
  bool fit_valid = false;
};

/// Mean squared discrepancy over nested centered windows of each replica.
VarianceCurve variance_curve_from_samples(std::span<const PointConfiguration> samples,
                                          std::span<const double> R_list);

VarianceCurve number_variance_curve(const ProcessModel& model, std::span<const double> R_list,
                                    std::size_t n_replicas, std::uint64_t seed);

struct IdentityCheck {
  double lhs = 0.0;  // E[N(N-1)] - R^{2d}
  double rhs = 0.0;  // E[D_R^2] - R^d
  double gap = 0.0;  // algebraic gap with the empirical mean in place of R^d
  double statistical_gap = 0.0;  // lhs - rhs, nonzero only through E[N] != R^d
  double mean_count = 0.0;
};

IdentityCheck discrepancy_identity_check(std::span<const PointConfiguration> samples, double R);

enum class DlogTrend { Vanishing, BoundedPositive, Diverging };
std::string to_string(DlogTrend trend);

struct DlogCurve {
  std::vector<double> R;
  std::vector<double> values;  // C_log * E[D_R^2] / R^d * log R
  std::vector<double> std_error;
  double last_decade_slope = 0.0;
  DlogTrend trend = DlogTrend::BoundedPositive;
  double c_log = 1.0;
};

/// Slope thresholds of the last-decade log-log trend classifier.
inline constexpr double kDlogDivergingSlope = 0.1;
inline constexpr double kDlogVanishingSlope = -0.1;

DlogCurve dlog_estimate(const ProcessModel& model, const Kernel& kernel, std::span<const double> R_list,
                        std::size_t n_replicas, std::uint64_t seed, double c_log = 1.0);
DlogCurve dlog_from_variance(const VarianceCurve& curve, int d, double c_log = 1.0);

struct TvLowerBound {
  double tv = 0.0;
  double noise_floor = 0.0;  // expected |empirical - true| scale of the L1 estimate
  std::size_t support_size = 0;
  bool sparse = false;       // fewer than 5 samples per occupied count vector
};

/// Total variation between the laws of the tile count vectors of two sample
/// sets; C_R is cut into `tile_count` equal slabs along the first axis.
TvLowerBound tv_lower_bound(std::span<const PointConfiguration> samples_p,
                            std::span<const PointConfiguration> samples_q, double R, int tile_count);

struct TvReport {
  double tv_lower = 0.0;
  double pinsker_upper = 0.0;
  double window_R = 0.0;
  bool satisfied = true;
};

/// pinsker_upper = sqrt(ers / 2) * R^{d/2}; satisfied when
/// tv_lower <= pinsker_upper + tv_error.
TvReport pinsker_check(double ers, double tv_lower, double R, int d = 1, double tv_error = 0.0);

}  // namespace rieszlab
