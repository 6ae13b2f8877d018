#include "rieszlab/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rieszlab/energy.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/parallel.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

NeighborDensity NeighborDensity::lattice(int k, double x_max, int n_bins) {
  if (k < 1 || n_bins < 1 || !(x_max > 0.0)) throw ArgumentError("NeighborDensity::lattice: invalid arguments");
  NeighborDensity out;
  out.k = k;
  out.x_max = x_max;
  out.n_bins = n_bins;
  for (int b = 0; b < n_bins; ++b) out.centers.push_back((b + 0.5) * out.bin_width());
  out.values.assign(static_cast<std::size_t>(n_bins), 0.0);
  out.std_error.assign(static_cast<std::size_t>(n_bins), 0.0);
  if (k <= x_max) {
    out.atoms.emplace_back(static_cast<double>(k), 1.0);
    out.total_mass = 1.0;
    out.mean_position = k;
  }
  return out;
}

NeighborDensity kth_neighbor_density(std::span<const PointConfiguration> samples, int k, double L, double x_max,
                                     int n_bins) {
  if (k < 1) throw ArgumentError("kth_neighbor_density: k must be >= 1");
  if (n_bins < 1 || !(x_max > 0.0)) throw ArgumentError("kth_neighbor_density: invalid bins");
  if (!(x_max < L)) throw DomainError("kth_neighbor_density: x_max must be below L");
  if (samples.size() < 2) throw ArgumentError("kth_neighbor_density: need at least two replicas");
  for (const auto& s : samples) {
    if (s.dim() != 1) throw ArgumentError("kth_neighbor_density: one-dimensional samples only");
    if (s.window().R < L) throw DomainError("kth_neighbor_density: L exceeds the sample window");
  }
  NeighborDensity out;
  out.k = k;
  out.x_max = x_max;
  out.n_bins = n_bins;
  out.n_replicas = samples.size();
  const double bw = out.bin_width();
  const auto nb = static_cast<std::size_t>(n_bins);

  auto per = parallel_map<std::vector<double>>(samples.size(), [&](std::size_t r) {
    const auto& s = samples[r];
    std::vector<std::pair<double, std::size_t>> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.point(i)[0];
      if (x >= -0.5 * L && x <= 0.5 * L) pts.emplace_back(x, i);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> hist(nb, 0.0);
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i + kk < pts.size(); ++i) {
      const double gap = pts[i + kk].first - pts[i].first;
      if (gap >= x_max) continue;
      const auto b = std::min(static_cast<std::size_t>(gap / bw), nb - 1);
      hist[b] += 1.0 / ((L - gap) * bw);
    }
    return hist;
  });

  std::vector<double> column(samples.size()), mass(samples.size(), 0.0), first(samples.size(), 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const double c = (static_cast<double>(b) + 0.5) * bw;
    for (std::size_t r = 0; r < samples.size(); ++r) {
      column[r] = per[r][b];
      mass[r] += per[r][b] * bw;
      first[r] += c * per[r][b] * bw;
    }
    const auto ms = mean_stderr(column);
    out.centers.push_back(c);
    out.values.push_back(ms.mean);
    out.std_error.push_back(ms.std_error);
  }
  const auto m = mean_stderr(mass);
  out.total_mass = m.mean;
  out.total_mass_error = m.std_error;
  out.mean_position = mean_stderr(first).mean;
  return out;
}

namespace {

// Integral of min((x - k)^2 / c, 1) over [a, b].
double clipped_square_integral(double a, double b, double k, double c) {
  const double w = std::sqrt(c);
  const double lo = std::clamp(k - w, a, b), hi = std::clamp(k + w, a, b);
  const double cube = (std::pow(hi - k, 3) - std::pow(lo - k, 3)) / (3.0 * c);
  return cube + (lo - a) + (b - hi);
}

}  // namespace

GapFunctionalValue crystallization_gap(std::span<const NeighborDensity> densities, double s_exponent, int k_max) {
  if (k_max < 1) throw ArgumentError("crystallization_gap: k_max must be >= 1");
  if (s_exponent < 0.0 || s_exponent >= 1.0) throw ArgumentError("crystallization_gap: s must lie in [0, 1)");
  if (densities.size() < static_cast<std::size_t>(k_max))
    throw ArgumentError("crystallization_gap: densities missing for some k <= k_max");
  GapFunctionalValue out;
  out.s_exponent = s_exponent;
  out.k_max = k_max;
  std::vector<double> terms, var_terms;
  double missing_mass = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const auto& d = densities[static_cast<std::size_t>(k - 1)];
    if (d.k != k) throw ArgumentError("crystallization_gap: density for k = " + std::to_string(k) + " missing");
    const double c = std::pow(static_cast<double>(k), s_exponent + 2.0);
    const double bw = d.bin_width();
    double term = 0.0;
    for (std::size_t b = 0; b < d.values.size(); ++b) {
      const double a = static_cast<double>(b) * bw;
      const double w = clipped_square_integral(a, a + bw, k, c);
      term += w * d.values[b];
      var_terms.push_back(std::pow(w * d.std_error[b], 2));
    }
    for (const auto& [x, mass] : d.atoms) term += std::min((x - k) * (x - k) / c, 1.0) * mass;
    terms.push_back(term);
    missing_mass += std::max(0.0, 1.0 - d.total_mass);
  }
  out.value = pairwise_sum(terms);
  out.std_error = std::sqrt(pairwise_sum(var_terms));

  // Power-law fit of the last half of the per-order terms.
  std::vector<double> lx, ly;
  for (int k = std::max(1, k_max / 2); k <= k_max; ++k) {
    const double t = terms[static_cast<std::size_t>(k - 1)];
    if (t > 0.0) {
      lx.push_back(std::log(static_cast<double>(k)));
      ly.push_back(std::log(t));
    }
  }
  double tail = 0.0;
  if (terms.back() > 0.0) {
    if (lx.size() >= 3) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= static_cast<double>(lx.size());
      my /= static_cast<double>(lx.size());
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
      }
      out.tail_exponent = -sxy / sxx;
    }
    tail = out.tail_exponent > 1.0 ? terms.back() * k_max / (out.tail_exponent - 1.0)
                                   : std::numeric_limits<double>::infinity();
  }
  out.truncation_bound = tail + missing_mass;
  return out;
}

namespace {

// f log f of a Gamma(theta, rate theta) density from its logarithm.
double gamma_f_log_f(double theta, double x) {
  if (x <= 0.0) return 0.0;
  const double lf = theta * std::log(theta) + (theta - 1.0) * std::log(x) - theta * x - std::lgamma(theta);
  return std::exp(lf) * lf;
}

double integrate_positive_axis(const quad::Integrand& f, double center, double spread) {
  const double a = std::max(0.0, center - 12.0 * spread);
  const double b = center + 12.0 * spread;
  double total = 0.0;
  if (a > 0.0) total += quad::endpoint_singular(f, 0.0, a, 1e-13);
  total += a > 0.0 ? quad::adaptive(f, a, b, 1e-13) : quad::endpoint_singular(f, 0.0, b, 1e-13);
  total += quad::half_line(f, b, 1e-13);
  return total;
}

}  // namespace

double renewal_entropy_rate(const GapLaw& gap) {
  double mean = 0.0, neg_entropy = 0.0;
  switch (gap.kind) {
    case GapLaw::Kind::Exponential:
    case GapLaw::Kind::Gamma: {
      const double theta = gap.gamma_shape();
      const double sd = 1.0 / std::sqrt(theta);
      mean = integrate_positive_axis([&](double x) { return x * gap.pdf(x); }, 1.0, sd);
      neg_entropy = integrate_positive_axis([&](double x) { return gamma_f_log_f(theta, x); }, 1.0, sd);
      break;
    }
    case GapLaw::Kind::UniformHat: {
      const auto [lo, hi] = gap.support();
      auto flogf = [&](double x) {
        const double f = gap.pdf(x);
        return f > 0.0 ? f * std::log(f) : 0.0;
      };
      auto xf = [&](double x) { return x * gap.pdf(x); };
      mean = quad::adaptive(xf, lo, 1.0, 1e-13) + quad::adaptive(xf, 1.0, hi, 1e-13);
      neg_entropy = quad::endpoint_singular(flogf, lo, 1.0, 1e-13) + quad::endpoint_singular(flogf, 1.0, hi, 1e-13);
      break;
    }
  }
  if (std::abs(mean - 1.0) > 1e-8)
    throw ArgumentError("renewal_entropy_rate: gap density has mean " + std::to_string(mean) + ", expected 1");
  return neg_entropy + 1.0;
}

FreeEnergyEntry free_energy_at(double beta, const Kernel& kernel, double theta, const FreeEnergyOptions& options) {
  if (!(beta > 0.0)) throw ArgumentError("free energy: beta must be positive");
  if (kernel.dim() != 1) throw ArgumentError("free energy: one-dimensional kernels only");
  const GapLaw gap = theta == 1.0 ? GapLaw::exponential() : GapLaw::gamma(theta);
  FreeEnergyEntry e;
  e.theta = theta;
  e.ers = renewal_entropy_rate(gap);
  try {
    e.wint = wint_rho2_limit(rho2_analytic(ProcessModel::renewal(gap), options.rho2), kernel);
    e.f = beta * e.wint + e.ers;
  } catch (const DivergenceError&) {
    e.feasible = false;
    e.wint = std::numeric_limits<double>::infinity();
    e.f = std::numeric_limits<double>::infinity();
  }
  return e;
}

FreeEnergyScan free_energy_scan(double beta, const Kernel& kernel, std::span<const double> theta_grid,
                                const FreeEnergyOptions& options) {
  if (!(beta > 0.0)) throw ArgumentError("free_energy_scan: beta must be positive");
  if (theta_grid.size() < 2) throw ArgumentError("free_energy_scan: theta_grid needs at least two values");
  bool has_one = false;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > 0.0)) throw ArgumentError("free_energy_scan: theta must be positive");
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1])) throw ArgumentError("free_energy_scan: theta_grid must increase");
    if (theta_grid[i] == 1.0) has_one = true;
  }
  if (!has_one) throw ArgumentError("free_energy_scan: theta_grid must contain 1");

  FreeEnergyScan scan;
  scan.beta = beta;
  scan.entries = parallel_map<FreeEnergyEntry>(
      theta_grid.size(), [&](std::size_t i) { return free_energy_at(beta, kernel, theta_grid[i], options); });

  std::size_t best = theta_grid.size();
  for (std::size_t i = 0; i < scan.entries.size(); ++i)
    if (scan.entries[i].feasible && (best == theta_grid.size() || scan.entries[i].f < scan.entries[best].f)) best = i;
  if (best == theta_grid.size()) throw DivergenceError("free_energy_scan: no feasible theta on the grid");

  double prev_w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    const auto& e = scan.entries[i];
    if (e.feasible) {
      if (e.wint > prev_w) scan.wint_monotone = false;
      prev_w = e.wint;
    }
    if (i > 0) {
      const auto& p = scan.entries[i - 1];
      if (e.theta <= 1.0 && e.ers > p.ers) scan.ers_unimodal = false;
      if (p.theta >= 1.0 && e.ers < p.ers) scan.ers_unimodal = false;
    }
  }

  std::size_t lo_i = best, hi_i = best;
  if (lo_i > 0 && scan.entries[lo_i - 1].feasible) --lo_i;
  if (hi_i + 1 < theta_grid.size()) ++hi_i;
  scan.grid_argmin = theta_grid[best];
  scan.bracket_lo = theta_grid[lo_i];
  scan.bracket_hi = theta_grid[hi_i];

  double best_theta = theta_grid[best];
  double best_f = scan.entries[best].f;
  auto f = [&](double t) {
    const auto e = free_energy_at(beta, kernel, t, options);
    if (e.feasible && e.f < best_f) {
      best_f = e.f;
      best_theta = t;
    }
    return e.f;
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = scan.bracket_lo, b = scan.bracket_hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > options.golden_tolerance * std::max(1.0, std::abs(best_theta))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  scan.argmin_theta = best_theta;
  scan.argmin_f = best_f;
  scan.refined_width = b - a;
  return scan;
}

}  // namespace rieszlab
