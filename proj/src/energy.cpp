#include "rieszlab/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "rieszlab/error.hpp"
#include "rieszlab/extrapolation.hpp"
#include "rieszlab/parallel.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

std::string to_string(EnergyRoute route) {
  switch (route) {
    case EnergyRoute::PairSumMC: return "PairSumMC";
    case EnergyRoute::Rho2Quadrature: return "Rho2Quadrature";
    case EnergyRoute::LatticeSeries: return "LatticeSeries";
  }
  return "unknown";
}

namespace {

void check_R_list(std::span<const double> R_list) {
  if (R_list.empty()) throw ArgumentError("R_list must not be empty");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0) || !std::isfinite(R_list[i])) throw ArgumentError("R_list entries must be positive");
    if (i > 0 && !(R_list[i] > R_list[i - 1])) throw ArgumentError("R_list must increase strictly");
  }
}

// 2 * integral of g(v) (R - v) over [0, R].
double bb_1d(const Kernel& kernel, double R) {
  return 2.0 * (R * kernel.primitive(R) - kernel.first_moment_primitive(R));
}

void check_integrable(const Rho2Analytic& rho2, const Kernel& kernel) {
  const double s = kernel.is_log() ? 0.0 : kernel.exponent();
  if (rho2.small_distance_exponent - s + (rho2.d - 1) <= -1.0)
    throw DivergenceError("g * rho_2 is not integrable at the origin for " + rho2.label);
}

// Integral of h over [0, L] split at the breakpoints of rho_2 and at half-integers.
double piecewise_integral(const Rho2Analytic& rho2, const quad::Integrand& h, double L) {
  std::vector<double> pts = rho2.breakpoints ? rho2.breakpoints(L) : std::vector<double>{};
  for (double m = 0.5; m < L; m += 1.0) pts.push_back(m);
  pts.push_back(L);
  std::sort(pts.begin(), pts.end());
  std::vector<double> parts;
  double lo = 0.0;
  for (double hi : pts) {
    if (!(hi > lo) || hi > L) continue;
    parts.push_back(lo == 0.0 ? quad::endpoint_singular(h, lo, hi, 1e-12) : quad::adaptive(h, lo, hi, 1e-12, nullptr, 1e-14 * (hi - lo)));
    lo = hi;
  }
  return pairwise_sum(parts);
}

double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// Integral over the unit sphere of prod_i (R - r |w_i|), valid for r <= R.
double tent_sphere_average(int d, double R, double r) {
  switch (d) {
    case 1: return 2.0 * (R - r);
    case 2: return 2.0 * std::numbers::pi * R * R - 8.0 * R * r + 2.0 * r * r;
    default:
      return 4.0 * std::numbers::pi * R * R * R - 6.0 * std::numbers::pi * R * R * r + 8.0 * R * r * r - r * r * r;
  }
}

// Integral over [-L, L]^d of g (rho_2 - 1) w, atoms included, where w is the
// tent weight for `tent_R` or 1 without it.
double deficit_integral(const Rho2Analytic& rho2, const Kernel& kernel, double L, std::optional<double> tent_R) {
  if (rho2.d != kernel.dim()) throw ArgumentError("correlation function and kernel dimensions differ");
  if (rho2.support_radius == 0.0 && !rho2.lattice_atoms) return 0.0;
  check_integrable(rho2, kernel);
  const int d = rho2.d;
  auto weight1 = [&](double x) { return tent_R ? *tent_R - x : 1.0; };

  if (d == 1) {
    const double upto = rho2.decays ? std::min(L, rho2.support_radius) : L;
    if (!std::isfinite(upto)) throw NotApplicableError("rho_2 - 1 has no finite support for " + rho2.label);
    auto h = [&](double x) {
      if (x <= 0.0) return 0.0;
      return kernel.radial(x) * (rho2(x) - 1.0) * weight1(x);
    };
    double total = piecewise_integral(rho2, h, upto);
    std::vector<double> atoms;
    for (double j : rho2.atoms_within(L)) atoms.push_back(kernel.radial(j) * weight1(j));
    total += pairwise_sum(atoms);
    return 2.0 * total;
  }

  if (rho2.lattice_atoms || !rho2.decays || !std::isfinite(rho2.support_radius))
    throw NotApplicableError("only compactly supported rho_2 - 1 is integrated for d >= 2");
  if (rho2.radial) {
    const double r_max = rho2.support_radius;
    if (tent_R && r_max > *tent_R) throw NotApplicableError("radial support exceeds the window side");
    const double upto = std::min(L, r_max);
    std::array<double, 3> v{};
    auto h = [&](double r) {
      if (r <= 0.0) return 0.0;
      v[0] = r;
      const double rho = rho2.density(std::span<const double>(v.data(), static_cast<std::size_t>(d)));
      const double angular = tent_R ? tent_sphere_average(d, *tent_R, r) : unit_sphere_area(d);
      return kernel.radial(r) * (rho - 1.0) * std::pow(r, d - 1) * angular;
    };
    return piecewise_integral(rho2, h, upto);
  }
  const double upto = std::min(L, rho2.support_radius);
  const quad::FieldIntegrand f = [&](std::span<const double> y) {
    double w = rho2.density(y) - 1.0;
    if (tent_R)
      for (double yi : y) w *= *tent_R - yi;
    return w;
  };
  const std::vector<double> extents(static_cast<std::size_t>(d), upto);
  return std::pow(2.0, d) * quad::corner_box(kernel, extents, &f);
}

void fill_diagnostics(EnergyReport& report) {
  std::vector<double> R, v;
  for (const auto& e : report.entries) {
    R.push_back(e.R);
    v.push_back(e.value);
  }
  const auto rich = richardson(R, v);
  report.richardson_iterates = rich.iterates;
  report.rate_constant = rate_constant(R, v);
  if (report.route != EnergyRoute::PairSumMC) {
    report.extrapolated = rich.extrapolated;
    report.extrapolation_error = rich.error;
  }
}

}  // namespace

BackgroundIntegrals::BackgroundIntegrals(const Kernel& kernel, double R) : kernel_(kernel), R_(R) {
  if (!(R > 0.0)) throw DomainError("background integrals: R must be positive");
  const int d = kernel.dim();
  if (d == 1) {
    bb_ = bb_1d(kernel, R);
  } else {
    const quad::FieldIntegrand tent = [R](std::span<const double> y) {
      double w = 1.0;
      for (double yi : y) w *= R - yi;
      return w;
    };
    const std::vector<double> extents(static_cast<std::size_t>(d), R);
    bb_ = std::pow(2.0, d) * quad::corner_box(kernel, extents, &tent);
  }
}

double BackgroundIntegrals::pb(std::span<const double> p) const {
  const int d = kernel_.dim();
  if (p.size() != static_cast<std::size_t>(d)) throw ArgumentError("pb: dimension mismatch");
  const double h = 0.5 * R_;
  for (double x : p)
    if (std::abs(x) > h) throw DomainError("pb: point outside the cube");
  if (d == 1) return kernel_.primitive(h + p[0]) + kernel_.primitive(h - p[0]);
  double total = 0.0;
  std::array<double, 3> ext{};
  for (int corner = 0; corner < (1 << d); ++corner) {
    for (int i = 0; i < d; ++i) {
      const double x = p[static_cast<std::size_t>(i)];
      ext[static_cast<std::size_t>(i)] = (corner >> i) & 1 ? h - x : h + x;
    }
    total += quad::corner_box(kernel_, std::span<const double>(ext.data(), static_cast<std::size_t>(d)));
  }
  return total;
}

double hint_R(const PointConfiguration& config, const BackgroundIntegrals& background, const Kernel& kernel,
              std::span<const double> center) {
  const int d = config.dim();
  if (kernel.dim() != d) throw ArgumentError("hint_R: kernel and configuration dimensions differ");
  std::array<double, 3> c{};
  if (!center.empty()) {
    if (center.size() != static_cast<std::size_t>(d)) throw ArgumentError("hint_R: center dimension mismatch");
    std::copy(center.begin(), center.end(), c.begin());
  }
  const double R = background.R();
  const double h = 0.5 * R;
  for (int i = 0; i < d; ++i) {
    const double ci = c[static_cast<std::size_t>(i)];
    if (ci - h < -config.window().half() || ci + h > config.window().half())
      throw DomainError("hint_R: cube exceeds the sample window");
  }
  std::vector<double> pts;
  for (std::size_t i = 0; i < config.size(); ++i) {
    auto p = config.point(i);
    bool inside = true;
    for (int j = 0; j < d; ++j) {
      const double x = p[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)];
      if (!(x >= -h && x <= h)) inside = false;
    }
    if (!inside) continue;
    for (int j = 0; j < d; ++j) pts.push_back(p[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)]);
  }
  const std::size_t n = pts.size() / static_cast<std::size_t>(d);
  std::vector<double> rows(n, 0.0);
  std::vector<double> pbs(n, 0.0);
  std::array<double, 3> v{};
  const auto vs = std::span<const double>(v.data(), static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < n; ++a) {
    const double* pa = &pts[a * static_cast<std::size_t>(d)];
    double row = 0.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double* pbp = &pts[b * static_cast<std::size_t>(d)];
      for (int j = 0; j < d; ++j) v[static_cast<std::size_t>(j)] = pa[j] - pbp[j];
      row += kernel_eval(kernel, vs);
    }
    rows[a] = 2.0 * row;
    pbs[a] = background.pb(std::span<const double>(pa, static_cast<std::size_t>(d)));
  }
  return pairwise_sum(rows) - 2.0 * pairwise_sum(pbs) + background.bb();
}

double hint_R(const PointConfiguration& config, double R, const Kernel& kernel, std::span<const double> center) {
  return hint_R(config, BackgroundIntegrals(kernel, R), kernel, center);
}

EnergyReport wint_monte_carlo(const ProcessModel& model, const Kernel& kernel, std::span<const double> R_list,
                              std::size_t n_replicas, std::uint64_t seed) {
  check_R_list(R_list);
  if (n_replicas < 30) throw ArgumentError("wint_monte_carlo: need at least 30 replicas");
  if (kernel.dim() != model.d) throw ArgumentError("wint_monte_carlo: kernel and model dimensions differ");
  const int d = model.d;
  std::vector<BackgroundIntegrals> backgrounds;
  for (double R : R_list) backgrounds.emplace_back(kernel, R);
  const Window window(R_list.back(), d);

  struct ReplicaValues {
    std::vector<double> values;
    bool singular = false;
  };
  auto per = parallel_map<ReplicaValues>(n_replicas, [&](std::size_t r) {
    const auto config = sample(model, window, Seed{seed, r});
    ReplicaValues out;
    try {
      for (std::size_t i = 0; i < R_list.size(); ++i)
        out.values.push_back(hint_R(config, backgrounds[i], kernel) / std::pow(R_list[i], d));
    } catch (const SingularityError&) {
      out.singular = true;
      out.values.clear();
    }
    return out;
  });

  EnergyReport report;
  report.route = EnergyRoute::PairSumMC;
  report.kernel = kernel;
  std::vector<const ReplicaValues*> good;
  for (const auto& p : per) {
    if (p.singular)
      ++report.singular_replicas;
    else
      good.push_back(&p);
  }
  if (static_cast<double>(report.singular_replicas) > 0.01 * static_cast<double>(n_replicas))
    throw SingularityError("wint_monte_carlo: more than 1% of replicas contain coincident points");
  if (good.size() < 2) throw ArgumentError("wint_monte_carlo: too few usable replicas");
  report.replicas_used = good.size();

  std::vector<double> column(good.size());
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    for (std::size_t r = 0; r < good.size(); ++r) column[r] = good[r]->values[i];
    const auto ms = mean_stderr(column);
    report.entries.push_back({R_list[i], ms.mean, ms.std_error});
  }
  // Logarithmic kernels leave a log(R)/R term on lattice-like processes.
  const bool log_term = kernel.is_log() && R_list.size() >= 4;
  auto intercept = [&](std::span<const double> R) {
    return log_term ? log_inverse_r_intercept_weights(R) : inverse_r_intercept_weights(R);
  };
  const auto weights = intercept(R_list);
  for (std::size_t r = 0; r < good.size(); ++r) column[r] = apply_weights(weights, good[r]->values);
  const auto fit = mean_stderr(column);
  report.extrapolated = fit.mean;
  report.extrapolated_std_error = fit.std_error;
  if (R_list.size() >= 3) {
    std::vector<double> means;
    for (const auto& e : report.entries) means.push_back(e.value);
    const auto tail_weights = intercept(R_list.subspan(1));
    report.extrapolation_error =
        std::abs(fit.mean - apply_weights(tail_weights, std::span<const double>(means).subspan(1)));
  }
  fill_diagnostics(report);
  return report;
}

double wint_rho2_at(const Rho2Analytic& rho2, const Kernel& kernel, double R) {
  if (!(R > 0.0)) throw DomainError("wint_rho2_at: R must be positive");
  return deficit_integral(rho2, kernel, R, R) / std::pow(R, rho2.d);
}

EnergyReport wint_from_rho2(const Rho2Analytic& rho2, const Kernel& kernel, std::span<const double> R_list) {
  check_R_list(R_list);
  EnergyReport report;
  report.route = EnergyRoute::Rho2Quadrature;
  report.kernel = kernel;
  auto values = parallel_map<double>(R_list.size(), [&](std::size_t i) { return wint_rho2_at(rho2, kernel, R_list[i]); });
  for (std::size_t i = 0; i < R_list.size(); ++i) report.entries.push_back({R_list[i], values[i], 0.0});
  fill_diagnostics(report);
  return report;
}

double wint_rho2_limit(const Rho2Analytic& rho2, const Kernel& kernel) {
  if (rho2.lattice_atoms || !rho2.decays || !std::isfinite(rho2.support_radius))
    throw NotApplicableError("wint_rho2_limit: needs compactly supported rho_2 - 1 without atoms");
  return deficit_integral(rho2, kernel, rho2.support_radius, std::nullopt);
}

double lattice_series_value(const Kernel& kernel, double R) {
  if (kernel.dim() != 1) throw ArgumentError("lattice series: one-dimensional kernels only");
  if (!(R >= 1.0)) throw DomainError("lattice series: R must be at least 1");
  const auto n = static_cast<std::size_t>(std::floor(R));
  std::vector<double> terms(n);
  for (std::size_t k = 1; k <= n; ++k) terms[k - 1] = kernel.radial(static_cast<double>(k)) * (R - static_cast<double>(k));
  const double sum = pairwise_sum(terms);
  const double integral = R * kernel.primitive(R) - kernel.first_moment_primitive(R);
  return 2.0 / R * (sum - integral);
}

EnergyReport wint_lattice_series(const Kernel& kernel, std::span<const double> R_list) {
  check_R_list(R_list);
  EnergyReport report;
  report.route = EnergyRoute::LatticeSeries;
  report.kernel = kernel;
  for (double R : R_list) report.entries.push_back({R, lattice_series_value(kernel, R), 0.0});
  fill_diagnostics(report);
  return report;
}

double wbs_energy(const Rho2Analytic& rho2, const Kernel& kernel, double v_max) {
  if (!kernel.is_log()) throw NotApplicableError("wbs_energy: logarithmic kernels only");
  if (!(v_max > 0.0)) throw DomainError("wbs_energy: v_max must be positive");
  if (rho2.lattice_atoms || !rho2.decays)
    throw NotApplicableError("wbs_energy: rho_2 - 1 does not decay for " + rho2.label);
  return deficit_integral(rho2, kernel, v_max, std::nullopt);
}

}  // namespace rieszlab
