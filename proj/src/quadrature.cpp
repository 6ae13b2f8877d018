#include "rieszlab/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rieszlab/error.hpp"

namespace rieszlab::quad {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr int kMaxDepth = 12;

double bisect(const Integrand& f, double a, double b, double tol_density, double rel_tol, int depth, double& err) {
  double e = 0.0, l1 = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e, &l1);
  if (depth >= kMaxDepth || e <= std::max(rel_tol * l1, tol_density * (b - a))) {
    err += e;
    return v;
  }
  const double m = 0.5 * (a + b);
  return bisect(f, a, m, tol_density, rel_tol, depth + 1, err) + bisect(f, m, b, tol_density, rel_tol, depth + 1, err);
}

}  // namespace

double adaptive(const Integrand& f, double a, double b, double rel_tol, double* error, double abs_tol) {
  if (a == b) return 0.0;
  double e = 0.0, l1 = 0.0;
  gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e, &l1);
  // Accept panels against the whole-interval L1 so near-zero stretches stop early.
  const double tol_density = std::max(rel_tol * l1, abs_tol) / (b - a);
  double err = 0.0;
  const double v = bisect(f, a, b, tol_density, rel_tol, 0, err);
  if (error) *error = err;
  return v;
}

double endpoint_singular(const Integrand& f, double a, double b, double rel_tol, double* error) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err = 0.0;
  const double v = integrator.integrate(f, a, b, rel_tol, &err);
  if (error) *error = err;
  return v;
}

double half_line(const Integrand& f, double a, double rel_tol, double* error) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  double err = 0.0;
  const double v = integrator.integrate([&](double x) { return f(a + x); }, 0.0,
                                        std::numeric_limits<double>::infinity(), rel_tol, &err);
  if (error) *error = err;
  return v;
}

double graded(const Integrand& f, double a, double b, double scale) {
  if (b <= a) return 0.0;
  double acc = 0.0;
  double lo = a;
  double width = scale > 0.0 ? scale : (b - a);
  while (lo < b) {
    const double hi = std::min(b, lo + width);
    acc += gauss<double, 20>::integrate(f, lo, hi);
    lo = hi;
    width *= 2.0;
  }
  return acc;
}

namespace {

// Integral over t in [0,1] of t^{d-1} g(t r), in closed form.
double radial_unit(const Kernel& kernel, int d, double r) {
  if (kernel.is_log()) return 1.0 / (d * d) - std::log(r) / d;
  return std::pow(r, -kernel.exponent()) / (d - kernel.exponent());
}

// Face integrand evaluated at the pyramid base point z (|z| > 0).
double pyramid_radial(const Kernel& kernel, int d, std::span<const double> z,
                      const FieldIntegrand* f) {
  const double r = norm(z);
  if (f == nullptr) return radial_unit(kernel, d, r);
  // t = u^p maps the radial weight t^{d-1-s} to a bounded one for Riesz.
  const double s = kernel.exponent();
  const double p = kernel.is_log() ? 2.0 / d : 1.0 / (d - s);
  std::array<double, 3> y{};
  auto radial = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double t = std::pow(u, p);
    for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = t * z[static_cast<std::size_t>(i)];
    const double jac = p * std::pow(u, p - 1.0);
    return jac * std::pow(t, d - 1) * kernel.radial(t * r) *
           (*f)(std::span<const double>(y.data(), static_cast<std::size_t>(d)));
  };
  return gauss<double, 30>::integrate(radial, 0.0, 1.0);
}

}  // namespace

double corner_box(const Kernel& kernel, std::span<const double> extents, const FieldIntegrand* f) {
  const int d = static_cast<int>(extents.size());
  if (d < 1 || d > 3) throw ArgumentError("corner_box: dimension must be 1, 2 or 3");
  for (double e : extents) {
    if (e < 0.0) throw DomainError("corner_box: negative extent");
    if (e == 0.0) return 0.0;
  }
  double total = 0.0;
  std::array<double, 3> z{};
  for (int i = 0; i < d; ++i) {
    const double a = extents[static_cast<std::size_t>(i)];
    std::array<int, 2> others{};
    int m = 0;
    for (int j = 0; j < d; ++j)
      if (j != i) others[static_cast<std::size_t>(m++)] = j;
    z[static_cast<std::size_t>(i)] = a;
    auto zs = std::span<const double>(z.data(), static_cast<std::size_t>(d));
    double face = 0.0;
    if (d == 1) {
      face = pyramid_radial(kernel, d, zs, f);
    } else if (d == 2) {
      const int j = others[0];
      face = graded(
          [&](double u) {
            z[static_cast<std::size_t>(j)] = u;
            return pyramid_radial(kernel, d, zs, f);
          },
          0.0, extents[static_cast<std::size_t>(j)], a);
    } else {
      const int j = others[0], k = others[1];
      face = graded(
          [&](double u) {
            z[static_cast<std::size_t>(j)] = u;
            return graded(
                [&](double w) {
                  z[static_cast<std::size_t>(k)] = w;
                  return pyramid_radial(kernel, d, zs, f);
                },
                0.0, extents[static_cast<std::size_t>(k)], std::hypot(a, u));
          },
          0.0, extents[static_cast<std::size_t>(j)], a);
    }
    total += a * face;
  }
  return total;
}

}  // namespace rieszlab::quad
