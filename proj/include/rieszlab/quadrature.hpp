#pragma once

#include <functional>
#include <span>

#include "rieszlab/core.hpp"

namespace rieszlab::quad {

using Integrand = std::function<double(double)>;
using FieldIntegrand = std::function<double(std::span<const double>)>;

/// Adaptive bisection with 31-point Gauss-Kronrod panels. A panel is accepted
/// when its error estimate is below max(rel_tol * L1, abs_tol * width / (b - a)).
double adaptive(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                double* error = nullptr, double abs_tol = 0.0);

/// Double-exponential rule; tolerates integrable endpoint singularities.
double endpoint_singular(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                         double* error = nullptr);

/// Integral over [a, inf) of a decaying integrand.
double half_line(const Integrand& f, double a, double rel_tol = 1e-12, double* error = nullptr);

/// Integral of g(|y|) f(y) over the box prod_i [0, extents_i], whose corner
/// at the origin carries the kernel singularity. The box is split into d
/// pyramids with apex at the origin; the radial variable is integrated with
/// a power substitution and the faces with geometrically graded
/// Gauss-Legendre panels. f == nullptr means f = 1, in which case the radial
/// integral is done in closed form.
double corner_box(const Kernel& kernel, std::span<const double> extents,
                  const FieldIntegrand* f = nullptr);

/// Composite Gauss-Legendre over [a, b] with panels refined geometrically
/// toward `a` down to scale `scale`.
double graded(const Integrand& f, double a, double b, double scale);

}  // namespace rieszlab::quad
