#pragma once

#include <span>
#include <vector>

namespace rieszlab {

/// One-step Richardson elimination of a c/R term along an increasing ladder.
struct RichardsonResult {
  std::vector<double> iterates;  // iterates[i] combines values i and i + 1
  /// Last iterate plus tail_correction.
  double extrapolated = 0.0;
  /// Geometric-series estimate of the remaining drift of the iterates.
  double tail_correction = 0.0;
  /// max(|last - previous iterate|, |tail_correction|); 0 with a single iterate.
  double error = 0.0;
};

/// Successive iterate differences must shrink at least by this factor
/// before the geometric tail correction is applied.
inline constexpr double kMaxTailRatio = 0.8;

/// iterate_i = (q v_{i+1} - v_i) / (q - 1), q = R_{i+1} / R_i; exact on a + b/R.
/// Residual terms such as log(R)/R or R^{-1-s} leave iterates that drift
/// geometrically along a doubling ladder; their limit is estimated from the
/// last three iterates.
RichardsonResult richardson(std::span<const double> R, std::span<const double> values);

/// Weights w with sum_i w_i v_i equal to the least-squares intercept of
/// v = a + b/R over the ladder.
std::vector<double> inverse_r_intercept_weights(std::span<const double> R);

/// As above for v = a + b/R + c log(R)/R; needs at least three rungs.
std::vector<double> log_inverse_r_intercept_weights(std::span<const double> R);

double apply_weights(std::span<const double> weights, std::span<const double> values);

/// Smallest C with |v_{i+1} - v_i| <= C / R_i along the ladder.
double rate_constant(std::span<const double> R, std::span<const double> values);

}  // namespace rieszlab
