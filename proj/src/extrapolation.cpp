#include "rieszlab/extrapolation.hpp"

#include <algorithm>
#include <cmath>

#include "rieszlab/error.hpp"

namespace rieszlab {

namespace {

void check_ladder(std::span<const double> R, std::span<const double> values) {
  if (R.size() != values.size()) throw ArgumentError("extrapolation: ladder and values differ in length");
  if (R.empty()) throw ArgumentError("extrapolation: empty ladder");
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (!(R[i] > 0.0)) throw ArgumentError("extrapolation: R must be positive");
    if (i > 0 && !(R[i] > R[i - 1])) throw ArgumentError("extrapolation: R must increase strictly");
  }
}

}  // namespace

RichardsonResult richardson(std::span<const double> R, std::span<const double> values) {
  check_ladder(R, values);
  RichardsonResult out;
  if (R.size() == 1) {
    out.extrapolated = values[0];
    return out;
  }
  for (std::size_t i = 0; i + 1 < R.size(); ++i) {
    const double q = R[i + 1] / R[i];
    out.iterates.push_back((q * values[i + 1] - values[i]) / (q - 1.0));
  }
  const auto& it = out.iterates;
  const std::size_t m = it.size();
  out.extrapolated = it.back();
  if (m >= 2) out.error = std::abs(it[m - 1] - it[m - 2]);
  if (m >= 3) {
    // Geometric tail of the iterates (Aitken), used only when the last two
    // differences share a sign and shrink.
    const double d1 = it[m - 2] - it[m - 3], d2 = it[m - 1] - it[m - 2];
    if (d1 != 0.0 && d2 / d1 > 0.0 && d2 / d1 < kMaxTailRatio) {
      const double r = d2 / d1;
      out.tail_correction = d2 * r / (1.0 - r);
      out.extrapolated += out.tail_correction;
      out.error = std::max(out.error, std::abs(out.tail_correction));
    }
  }
  return out;
}

std::vector<double> inverse_r_intercept_weights(std::span<const double> R) {
  std::vector<double> dummy(R.size(), 0.0);
  check_ladder(R, dummy);
  const auto n = static_cast<double>(R.size());
  if (R.size() == 1) return {1.0};
  double mx = 0.0;
  for (double r : R) mx += 1.0 / r;
  mx /= n;
  double sxx = 0.0;
  for (double r : R) sxx += (1.0 / r - mx) * (1.0 / r - mx);
  std::vector<double> w;
  for (double r : R) w.push_back(1.0 / n - mx * (1.0 / r - mx) / sxx);
  return w;
}

std::vector<double> log_inverse_r_intercept_weights(std::span<const double> R) {
  std::vector<double> dummy(R.size(), 0.0);
  check_ladder(R, dummy);
  if (R.size() < 3) throw ArgumentError("log_inverse_r_intercept_weights: need at least three rungs");
  constexpr int p = 3;
  auto basis = [](double r, int j) { return j == 0 ? 1.0 : j == 1 ? 1.0 / r : std::log(r) / r; };
  // Gauss-Jordan on [X^T X | X^T]; row 0 of the result holds the weights.
  const std::size_t n = R.size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + n, 0.0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j)
      for (double r : R) a[i][j] += basis(r, i) * basis(r, j);
    for (std::size_t k = 0; k < n; ++k) a[i][p + k] = basis(R[k], i);
  }
  for (int c = 0; c < p; ++c) {
    int piv = c;
    for (int i = c + 1; i < p; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (auto& x : a[c]) x /= d;
    for (int i = 0; i < p; ++i) {
      if (i == c) continue;
      const double f = a[i][c];
      for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[c][j];
    }
  }
  return {a[0].begin() + p, a[0].end()};
}

double apply_weights(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) throw ArgumentError("apply_weights: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

double rate_constant(std::span<const double> R, std::span<const double> values) {
  check_ladder(R, values);
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < R.size(); ++i) c = std::max(c, R[i] * std::abs(values[i + 1] - values[i]));
  return c;
}

}  // namespace rieszlab
