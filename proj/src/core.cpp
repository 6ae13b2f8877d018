#include "rieszlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rieszlab/error.hpp"

namespace rieszlab {

Kernel Kernel::log1d() { return Kernel(KernelFamily::Log1D, 1, 0.0); }

Kernel Kernel::log2d() { return Kernel(KernelFamily::Log2D, 2, 0.0); }

Kernel Kernel::riesz(int d, double s) {
  if (d < 1 || d > 3) throw ArgumentError("Riesz kernel: dimension must be 1, 2 or 3");
  if (!std::isfinite(s) || s <= 0.0 || s >= d || s < std::max(0, d - 2))
    throw ArgumentError("Riesz kernel: need max(0, d-2) <= s < d and s > 0, got s = " +
                        std::to_string(s));
  return Kernel(KernelFamily::Riesz, d, s);
}

double Kernel::radial(double r) const {
  if (!(r > 0.0)) throw SingularityError("kernel evaluated at zero separation");
  if (family_ == KernelFamily::Riesz) return std::pow(r, -s_);
  return -std::log(r);
}

double Kernel::primitive(double a) const {
  if (a <= 0.0) return 0.0;
  if (family_ == KernelFamily::Riesz) return std::pow(a, 1.0 - s_) / (1.0 - s_);
  return a - a * std::log(a);
}

double Kernel::first_moment_primitive(double a) const {
  if (a <= 0.0) return 0.0;
  if (family_ == KernelFamily::Riesz) return std::pow(a, 2.0 - s_) / (2.0 - s_);
  return 0.25 * a * a - 0.5 * a * a * std::log(a);
}

std::string Kernel::name() const {
  switch (family_) {
    case KernelFamily::Log1D: return "log1d";
    case KernelFamily::Log2D: return "log2d";
    case KernelFamily::Riesz: return "riesz";
  }
  return "unknown";
}

Window::Window(double side, int dim) : R(side), d(dim) {
  if (!(side > 0.0) || !std::isfinite(side)) throw DomainError("window side must be positive");
  if (dim < 1 || dim > 3) throw ArgumentError("window dimension must be 1, 2 or 3");
}

double Window::volume() const { return std::pow(R, d); }

bool Window::contains(std::span<const double> p) const {
  const double h = half();
  return std::all_of(p.begin(), p.end(), [h](double x) { return x >= -h && x <= h; });
}

PointConfiguration::PointConfiguration(Window window) : window_(window) {}

PointConfiguration::PointConfiguration(Window window, std::vector<double> coords)
    : window_(window), coords_(std::move(coords)) {
  const auto d = static_cast<std::size_t>(window_.d);
  if (coords_.size() % d != 0) throw ArgumentError("coordinate count not a multiple of d");
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    if (std::any_of(p.begin(), p.end(), [](double x) { return std::isnan(x); }))
      throw DomainError("NaN coordinate");
    if (!window_.contains(p)) throw DomainError("point outside window");
  }
}

void PointConfiguration::push_back(std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(window_.d)) throw ArgumentError("dimension mismatch");
  if (std::any_of(p.begin(), p.end(), [](double x) { return std::isnan(x); }))
    throw DomainError("NaN coordinate");
  if (!window_.contains(p)) throw DomainError("point outside window");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointConfiguration PointConfiguration::restrict_to(double R) const {
  if (R > window_.R) throw DomainError("sub-window larger than the configuration window");
  PointConfiguration out(Window(R, window_.d));
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    if (out.window_.contains(p)) out.coords_.insert(out.coords_.end(), p.begin(), p.end());
  }
  return out;
}

bool PointConfiguration::has_duplicates() const {
  const std::size_t n = size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    auto pa = point(a), pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  for (std::size_t i = 1; i < n; ++i) {
    auto pa = point(order[i - 1]), pb = point(order[i]);
    if (std::equal(pa.begin(), pa.end(), pb.begin())) return true;
  }
  return false;
}

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double kernel_eval(const Kernel& kernel, std::span<const double> v) {
  if (static_cast<int>(v.size()) != kernel.dim())
    throw ArgumentError("kernel_eval: vector dimension does not match kernel");
  const double r = norm(v);
  if (r == 0.0) throw SingularityError("kernel_eval: zero vector");
  return kernel.radial(r);
}

double tent_weight(std::span<const double> v, double R) {
  double w = 1.0;
  for (double x : v) {
    const double a = std::abs(x);
    if (a > R) throw DomainError("tent_weight: |v_i| exceeds R");
    w *= R - a;
  }
  return w;
}

double psi_weight(const Kernel& kernel, double x, double R) {
  if (kernel.dim() != 1) throw ArgumentError("psi_weight: one-dimensional kernels only");
  if (!(x > 0.0) || x > R) throw DomainError("psi_weight: need 0 < x <= R");
  if (x == R) return 0.0;
  return 2.0 / R * kernel.radial(x) * (R - x);
}

DiscrepancyStat discrepancy(const PointConfiguration& config, double R) {
  if (!(R > 0.0) || R > config.window().R)
    throw DomainError("discrepancy: R must lie in (0, window side]");
  const Window sub(R, config.dim());
  std::size_t n = 0;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (sub.contains(config.point(i))) ++n;
  return {R, n, static_cast<double>(n) - sub.volume()};
}

}  // namespace rieszlab
