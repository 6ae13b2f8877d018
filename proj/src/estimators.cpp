#include "rieszlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rieszlab/error.hpp"
#include "rieszlab/parallel.hpp"

namespace rieszlab {

namespace {

double shell_volume(int d, double r0, double r1) {
  switch (d) {
    case 1: return 2.0 * (r1 - r0);
    case 2: return std::numbers::pi * (r1 * r1 - r0 * r0);
    default: return 4.0 / 3.0 * std::numbers::pi * (r1 * r1 * r1 - r0 * r0 * r0);
  }
}

// Per-replica bin averages of rho_2.
std::vector<double> replica_rho2(const PointConfiguration& config, const BinSpec& bins) {
  const int d = config.dim();
  const double R = config.window().R;
  const double width = bins.width();
  std::vector<double> acc(static_cast<std::size_t>(bins.n_bins), 0.0);
  const std::size_t n = config.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return config.point(a)[0] < config.point(b)[0]; });
  std::vector<double> v(static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < n; ++a) {
    auto p = config.point(order[a]);
    for (std::size_t b = a + 1; b < n; ++b) {
      auto q = config.point(order[b]);
      if (q[0] - p[0] >= bins.v_max) break;
      for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)];
      const double tent = tent_weight(v, R);
      if (bins.mode == BinSpec::Mode::Signed1D) {
        // (q - p) and (p - q): both ordered pairs.
        for (double sv : {v[0], -v[0]}) {
          const auto bin = static_cast<long>(std::floor((sv - bins.lower()) / width));
          if (bin >= 0 && bin < bins.n_bins) acc[static_cast<std::size_t>(bin)] += 1.0 / (width * tent);
        }
      } else {
        const double r = norm(v);
        if (r >= bins.v_max) continue;
        const auto bin = static_cast<long>(std::floor(r / width));
        if (bin < 0 || bin >= bins.n_bins) continue;
        const double r0 = bin * width, r1 = r0 + width;
        acc[static_cast<std::size_t>(bin)] += 2.0 / (shell_volume(d, r0, r1) * tent);
      }
    }
  }
  return acc;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace

CorrelationEstimate estimate_rho2(std::span<const PointConfiguration> samples, const BinSpec& bins) {
  if (samples.size() < 2) throw ArgumentError("estimate_rho2: need at least two replicas for a standard error");
  if (bins.n_bins < 1 || !(bins.v_max > 0.0)) throw ArgumentError("estimate_rho2: invalid bin specification");
  const int d = samples.front().dim();
  if (bins.mode == BinSpec::Mode::Signed1D && d != 1)
    throw ArgumentError("estimate_rho2: signed binning is one-dimensional");
  for (const auto& s : samples) {
    if (s.dim() != d) throw ArgumentError("estimate_rho2: mixed dimensions");
    if (bins.v_max >= s.window().R) throw DomainError("estimate_rho2: v_max must be below the window side");
  }
  auto per_replica = parallel_map<std::vector<double>>(
      samples.size(), [&](std::size_t r) { return replica_rho2(samples[r], bins); });

  CorrelationEstimate est;
  est.d = d;
  est.bins = bins;
  est.n_replicas = samples.size();
  std::vector<double> column(samples.size());
  for (int b = 0; b < bins.n_bins; ++b) {
    for (std::size_t r = 0; r < samples.size(); ++r) column[r] = per_replica[r][static_cast<std::size_t>(b)];
    const auto ms = mean_stderr(column);
    est.centers.push_back(bins.center(b));
    est.values.push_back(ms.mean - 1.0);
    est.std_error.push_back(ms.std_error);
  }
  return est;
}

VarianceCurve variance_curve_from_samples(std::span<const PointConfiguration> samples,
                                          std::span<const double> R_list) {
  if (samples.empty()) throw ArgumentError("variance curve: no samples");
  VarianceCurve curve;
  std::vector<double> sq(samples.size());
  for (double R : R_list) {
    for (std::size_t r = 0; r < samples.size(); ++r) {
      const double dr = discrepancy(samples[r], R).discrepancy;
      sq[r] = dr * dr;
    }
    const auto ms = mean_stderr(sq);
    curve.entries.push_back({R, ms.mean, ms.std_error});
  }
  std::vector<double> lx, ly;
  for (const auto& e : curve.entries)
    if (e.mean_sq > 0.0) {
      lx.push_back(std::log(e.R));
      ly.push_back(std::log(e.mean_sq));
    }
  if (lx.size() >= 2 && lx.front() != lx.back()) {
    const auto fit = least_squares(lx, ly);
    curve.fitted_exponent = fit.slope;
    curve.fitted_log_prefactor = fit.intercept;
    curve.exponent_ci = 1.96 * fit.slope_se;
    curve.fit_valid = true;
  }
  return curve;
}

VarianceCurve number_variance_curve(const ProcessModel& model, std::span<const double> R_list,
                                    std::size_t n_replicas, std::uint64_t seed) {
  if (R_list.size() < 2) throw ArgumentError("number_variance_curve: degenerate fit, need at least two R values");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    if (!(R_list[i] > R_list[i - 1])) throw ArgumentError("number_variance_curve: R_list must increase strictly");
  if (R_list.size() < 4 || R_list.back() < 10.0 * R_list.front())
    throw ArgumentError("number_variance_curve: need at least 4 R values spanning a decade");
  if (n_replicas < 2) throw ArgumentError("number_variance_curve: need at least two replicas");
  const Window window(R_list.back(), model.d);
  auto samples = parallel_map<PointConfiguration>(
      n_replicas, [&](std::size_t r) { return sample(model, window, Seed{seed, r}); });
  return variance_curve_from_samples(samples, R_list);
}

IdentityCheck discrepancy_identity_check(std::span<const PointConfiguration> samples, double R) {
  if (samples.size() < 2) throw ArgumentError("discrepancy_identity_check: need at least two replicas");
  const int d = samples.front().dim();
  const double vol = std::pow(R, d);
  std::vector<double> counts(samples.size());
  for (std::size_t r = 0; r < samples.size(); ++r)
    counts[r] = static_cast<double>(discrepancy(samples[r], R).n);
  const double n = static_cast<double>(samples.size());
  const double m1 = pairwise_sum(counts) / n;
  std::vector<double> tmp(samples.size());
  for (std::size_t r = 0; r < counts.size(); ++r) tmp[r] = counts[r] * (counts[r] - 1.0);
  const double pair_moment = pairwise_sum(tmp) / n;
  for (std::size_t r = 0; r < counts.size(); ++r) tmp[r] = (counts[r] - m1) * (counts[r] - m1);
  const double centered = pairwise_sum(tmp) / n;
  for (std::size_t r = 0; r < counts.size(); ++r) tmp[r] = (counts[r] - vol) * (counts[r] - vol);
  const double disc_sq = pairwise_sum(tmp) / n;

  IdentityCheck out;
  out.mean_count = m1;
  out.lhs = pair_moment - vol * vol;
  out.rhs = disc_sq - vol;
  // With m1 in place of R^d both sides are moments of the same counts.
  out.gap = (pair_moment - m1 * m1) - (centered - m1);
  out.statistical_gap = out.lhs - out.rhs;
  return out;
}

std::string to_string(DlogTrend trend) {
  switch (trend) {
    case DlogTrend::Vanishing: return "bounded_to_zero";
    case DlogTrend::BoundedPositive: return "bounded_positive";
    case DlogTrend::Diverging: return "diverging";
  }
  return "unknown";
}

DlogCurve dlog_from_variance(const VarianceCurve& curve, int d, double c_log) {
  DlogCurve out;
  out.c_log = c_log;
  for (const auto& e : curve.entries) {
    const double scale = c_log * std::log(e.R) / std::pow(e.R, d);
    out.R.push_back(e.R);
    out.values.push_back(scale * e.mean_sq);
    out.std_error.push_back(std::abs(scale) * e.std_error);
  }
  const double last = out.R.back();
  std::vector<double> lx, ly;
  double largest = 0.0;
  for (std::size_t i = 0; i < out.R.size(); ++i) {
    if (out.R[i] < last / 10.0) continue;
    largest = std::max(largest, std::abs(out.values[i]));
    if (out.values[i] > 0.0) {
      lx.push_back(std::log(out.R[i]));
      ly.push_back(std::log(out.values[i]));
    }
  }
  if (largest <= 1e-12 || lx.size() < 2) {
    out.last_decade_slope = -std::numeric_limits<double>::infinity();
    out.trend = DlogTrend::Vanishing;
    return out;
  }
  out.last_decade_slope = least_squares(lx, ly).slope;
  if (out.last_decade_slope > kDlogDivergingSlope)
    out.trend = DlogTrend::Diverging;
  else if (out.last_decade_slope < kDlogVanishingSlope)
    out.trend = DlogTrend::Vanishing;
  else
    out.trend = DlogTrend::BoundedPositive;
  return out;
}

DlogCurve dlog_estimate(const ProcessModel& model, const Kernel& kernel, std::span<const double> R_list,
                        std::size_t n_replicas, std::uint64_t seed, double c_log) {
  if (!kernel.is_log()) throw NotApplicableError("dlog_estimate: only defined for logarithmic kernels");
  if (kernel.dim() != model.d) throw ArgumentError("dlog_estimate: kernel and model dimensions differ");
  return dlog_from_variance(number_variance_curve(model, R_list, n_replicas, seed), model.d, c_log);
}

namespace {

std::map<std::vector<int>, double> count_vector_law(std::span<const PointConfiguration> samples, double R,
                                                    int tile_count) {
  std::map<std::vector<int>, double> law;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const auto& s : samples) {
    if (s.window().R < R) throw DomainError("tv_lower_bound: sample window smaller than C_R");
    const Window sub(R, s.dim());
    std::vector<int> counts(static_cast<std::size_t>(tile_count), 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto p = s.point(i);
      if (!sub.contains(p)) continue;
      auto t = static_cast<long>(std::floor((p[0] + sub.half()) / R * tile_count));
      t = std::clamp(t, 0L, static_cast<long>(tile_count - 1));
      ++counts[static_cast<std::size_t>(t)];
    }
    law[counts] += w;
  }
  return law;
}

}  // namespace

TvLowerBound tv_lower_bound(std::span<const PointConfiguration> samples_p,
                            std::span<const PointConfiguration> samples_q, double R, int tile_count) {
  if (tile_count < 1) throw ArgumentError("tv_lower_bound: tile_count must be >= 1");
  if (samples_p.empty() || samples_q.empty()) throw ArgumentError("tv_lower_bound: empty sample set");
  auto p = count_vector_law(samples_p, R, tile_count);
  auto q = count_vector_law(samples_q, R, tile_count);
  const double np = static_cast<double>(samples_p.size()), nq = static_cast<double>(samples_q.size());
  TvLowerBound out;
  std::map<std::vector<int>, std::pair<double, double>> joint;
  for (const auto& [k, v] : p) joint[k].first = v;
  for (const auto& [k, v] : q) joint[k].second = v;
  double l1 = 0.0, noise = 0.0;
  for (const auto& [k, pq] : joint) {
    l1 += std::abs(pq.first - pq.second);
    noise += std::sqrt(pq.first * (1.0 - pq.first) / np + pq.second * (1.0 - pq.second) / nq);
  }
  out.tv = 0.5 * l1;
  out.noise_floor = 0.5 * noise * std::sqrt(2.0 / std::numbers::pi);
  out.support_size = joint.size();
  out.sparse = static_cast<double>(joint.size()) * 5.0 > std::min(np, nq);
  return out;
}

TvReport pinsker_check(double ers, double tv_lower, double R, int d, double tv_error) {
  if (ers < 0.0 || std::isnan(ers)) throw ArgumentError("pinsker_check: specific relative entropy must be >= 0");
  TvReport out;
  out.tv_lower = tv_lower;
  out.window_R = R;
  out.pinsker_upper = std::sqrt(ers / 2.0) * std::pow(R, 0.5 * d);
  out.satisfied = tv_lower <= out.pinsker_upper + tv_error;
  return out;
}

}  // namespace rieszlab
