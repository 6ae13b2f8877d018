#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rieszlab {

enum class KernelFamily { Log1D, Log2D, Riesz };

/// Pair interaction g: -log|x| in d = 1, 2, or |x|^{-s} with
/// max(0, d - 2) <= s < d (and s > 0).
class Kernel {
 public:
  static Kernel log1d();
  static Kernel log2d();
  static Kernel riesz(int d, double s);

  KernelFamily family() const { return family_; }
  int dim() const { return d_; }
  /// Riesz exponent; 0 for the logarithmic families.
  double exponent() const { return s_; }
  bool is_log() const { return family_ != KernelFamily::Riesz; }

  /// g as a function of the distance r > 0.
  double radial(double r) const;
  /// G(a) = integral of g(t) over t in [0, a] (one-dimensional primitive).
  double primitive(double a) const;
  /// Integral of t * g(t) over [0, a].
  double first_moment_primitive(double a) const;

  std::string name() const;

 private:
  Kernel(KernelFamily family, int d, double s) : family_(family), d_(d), s_(s) {}

  KernelFamily family_;
  int d_;
  double s_;
};

/// The hypercube C_R = [-R/2, R/2]^d.
struct Window {
  double R = 1.0;
  int d = 1;

  Window() = default;
  Window(double side, int dim);

  double volume() const;
  double half() const { return 0.5 * R; }
  /// Closed-interval membership, exact comparison.
  bool contains(std::span<const double> p) const;
};

/// Finite point set inside a window, stored row-major (n x d).
class PointConfiguration {
 public:
  PointConfiguration() = default;
  explicit PointConfiguration(Window window);
  PointConfiguration(Window window, std::vector<double> coords);

  int dim() const { return window_.d; }
  const Window& window() const { return window_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(window_.d); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(window_.d),
            static_cast<std::size_t>(window_.d)};
  }
  const std::vector<double>& coords() const { return coords_; }

  /// Appends a point; throws DomainError outside the window or on NaN.
  void push_back(std::span<const double> p);

  /// Points lying in the centered sub-cube C_R, R <= window side.
  PointConfiguration restrict_to(double R) const;

  /// True when two points share all coordinates.
  bool has_duplicates() const;

 private:
  Window window_;
  std::vector<double> coords_;
};

struct DiscrepancyStat {
  double R = 0.0;
  std::size_t n = 0;
  double discrepancy = 0.0;  // n - R^d
};

double kernel_eval(const Kernel& kernel, std::span<const double> v);

/// prod_i (R - |v_i|), the translated-pair volume without its 2^d factor.
double tent_weight(std::span<const double> v, double R);

/// psi_R(x) = (2/R) g(x) (R - x), one-dimensional kernels only.
double psi_weight(const Kernel& kernel, double x, double R);

DiscrepancyStat discrepancy(const PointConfiguration& config, double R);

double norm(std::span<const double> v);

}  // namespace rieszlab
