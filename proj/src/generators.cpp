#include "rieszlab/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "rieszlab/error.hpp"

namespace rieszlab {

// ---------------------------------------------------------------- GapLaw

GapLaw GapLaw::exponential() { return GapLaw{Kind::Exponential, 1.0, 0}; }

GapLaw GapLaw::gamma(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ArgumentError("Gamma gap law: shape must be positive");
  return GapLaw{Kind::Gamma, theta, 0};
}

GapLaw GapLaw::uniform_hat(int k) {
  // k = 1 would put mass on negative gaps.
  if (k < 2) throw ArgumentError("UniformHat gap law: need k >= 2");
  return GapLaw{Kind::UniformHat, 1.0, k};
}

double GapLaw::gamma_shape() const { return kind == Kind::Exponential ? 1.0 : shape; }

double vibration_hat(int k, double x) {
  const double a = 2.0 / k;
  const double ax = std::abs(x);
  return ax >= a ? 0.0 : (a - ax) / (a * a);
}

double GapLaw::pdf(double x) const {
  switch (kind) {
    case Kind::Exponential: return x < 0.0 ? 0.0 : std::exp(-x);
    case Kind::Gamma: {
      if (x < 0.0) return 0.0;
      if (x == 0.0) return shape < 1.0 ? std::numeric_limits<double>::infinity() : (shape == 1.0 ? 1.0 : 0.0);
      return std::exp(shape * std::log(shape) + (shape - 1.0) * std::log(x) - shape * x -
                      std::lgamma(shape));
    }
    case Kind::UniformHat: return vibration_hat(k, x - 1.0);
  }
  return 0.0;
}

double GapLaw::variance() const {
  switch (kind) {
    case Kind::Exponential: return 1.0;
    case Kind::Gamma: return 1.0 / shape;
    case Kind::UniformHat: return 2.0 / (3.0 * k * k);
  }
  return 0.0;
}

double GapLaw::stddev() const { return std::sqrt(variance()); }

std::pair<double, double> GapLaw::support() const {
  if (kind == Kind::UniformHat) return {1.0 - 2.0 / k, 1.0 + 2.0 / k};
  return {0.0, std::numeric_limits<double>::infinity()};
}

double GapLaw::draw(Engine& rng) const {
  switch (kind) {
    case Kind::Exponential: return std::exponential_distribution<double>(1.0)(rng);
    case Kind::Gamma: return std::gamma_distribution<double>(shape, 1.0 / shape)(rng);
    case Kind::UniformHat: {
      std::uniform_real_distribution<double> v(-1.0 / k, 1.0 / k);
      const double a = v(rng);
      const double b = v(rng);
      return 1.0 + b - a;
    }
  }
  return 1.0;
}

double GapLaw::draw_size_biased(Engine& rng) const {
  switch (kind) {
    case Kind::Exponential: return std::gamma_distribution<double>(2.0, 1.0)(rng);
    case Kind::Gamma: return std::gamma_distribution<double>(shape + 1.0, 1.0 / shape)(rng);
    case Kind::UniformHat: {
      const double top = support().second;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (;;) {
        const double x = draw(rng);
        if (u(rng) * top <= x) return x;
      }
    }
  }
  return 1.0;
}

std::string GapLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Exponential: os << "exponential"; break;
    case Kind::Gamma: os << "gamma(" << shape << ")"; break;
    case Kind::UniformHat: os << "uniform_hat(" << k << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------- ProcessModel

namespace {
void check_dim(int d) {
  if (d < 1 || d > 3) throw ArgumentError("process dimension must be 1, 2 or 3");
}
}  // namespace

ProcessModel ProcessModel::poisson(int d) {
  check_dim(d);
  return {Kind::Poisson, d, 0, {}};
}

ProcessModel ProcessModel::lattice(int d) {
  check_dim(d);
  return {Kind::Lattice, d, 0, {}};
}

ProcessModel ProcessModel::bernoulli_block(int d, int k) {
  check_dim(d);
  if (k < 1) throw ArgumentError("BernoulliBlock: block side must be a positive integer");
  return {Kind::BernoulliBlock, d, k, {}};
}

ProcessModel ProcessModel::vibrating_lattice(int k) {
  if (k < 1) throw ArgumentError("VibratingLattice: k must be a positive integer");
  return {Kind::VibratingLattice, 1, k, {}};
}

ProcessModel ProcessModel::renewal(GapLaw gap) { return {Kind::Renewal, 1, 0, gap}; }

std::string ProcessModel::descriptor() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Poisson: os << "poisson"; break;
    case Kind::Lattice: os << "lattice"; break;
    case Kind::BernoulliBlock: os << "bernoulli_block(k=" << k << ")"; break;
    case Kind::VibratingLattice: os << "vibrating_lattice(k=" << k << ")"; break;
    case Kind::Renewal: os << "renewal(" << gap.describe() << ")"; break;
  }
  os << ",d=" << d;
  return os.str();
}

// ---------------------------------------------------------------- sample

namespace {

// Integer translates z (per axis range [lo_i, hi_i]) visited in lexicographic order.
template <typename Fn>
void for_each_cell(int d, const std::array<long, 3>& lo, const std::array<long, 3>& hi, Fn&& fn) {
  std::array<long, 3> z{};
  for (int i = 0; i < d; ++i) {
    if (hi[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i)]) return;
    z[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
  }
  for (;;) {
    fn(z);
    int axis = d - 1;
    while (axis >= 0) {
      auto a = static_cast<std::size_t>(axis);
      if (++z[a] <= hi[a]) break;
      z[a] = lo[a];
      --axis;
    }
    if (axis < 0) return;
  }
}

void sample_poisson(PointConfiguration& out, Engine& rng) {
  const Window& w = out.window();
  std::poisson_distribution<long> count(w.volume());
  std::uniform_real_distribution<double> u(-w.half(), w.half());
  const long n = count(rng);
  std::array<double, 3> p{};
  for (long i = 0; i < n; ++i) {
    for (int a = 0; a < w.d; ++a) p[static_cast<std::size_t>(a)] = u(rng);
    out.push_back({p.data(), static_cast<std::size_t>(w.d)});
  }
}

void sample_lattice(PointConfiguration& out, Engine& rng) {
  const Window& w = out.window();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::array<double, 3> shift{};
  std::array<long, 3> lo{}, hi{};
  for (int a = 0; a < w.d; ++a) {
    auto i = static_cast<std::size_t>(a);
    shift[i] = u01(rng);
    lo[i] = static_cast<long>(std::ceil(-w.half() - shift[i]));
    hi[i] = static_cast<long>(std::floor(w.half() - shift[i]));
  }
  std::array<double, 3> p{};
  for_each_cell(w.d, lo, hi, [&](const std::array<long, 3>& z) {
    for (int a = 0; a < w.d; ++a) {
      auto i = static_cast<std::size_t>(a);
      p[i] = static_cast<double>(z[i]) + shift[i];
    }
    auto ps = std::span<const double>(p.data(), static_cast<std::size_t>(w.d));
    if (w.contains(ps)) out.push_back(ps);
  });
}

void sample_block(PointConfiguration& out, int k, Engine& rng) {
  const Window& w = out.window();
  const double side = k;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::array<double, 3> shift{};
  std::array<long, 3> lo{}, hi{};
  for (int a = 0; a < w.d; ++a) {
    auto i = static_cast<std::size_t>(a);
    shift[i] = side * u01(rng);
    lo[i] = static_cast<long>(std::floor((-w.half() - shift[i]) / side));
    hi[i] = static_cast<long>(std::floor((w.half() - shift[i]) / side));
  }
  long per_tile = 1;
  for (int a = 0; a < w.d; ++a) per_tile *= k;
  std::array<double, 3> p{};
  for_each_cell(w.d, lo, hi, [&](const std::array<long, 3>& z) {
    for (long m = 0; m < per_tile; ++m) {
      for (int a = 0; a < w.d; ++a) {
        auto i = static_cast<std::size_t>(a);
        p[i] = shift[i] + side * (static_cast<double>(z[i]) + u01(rng));
      }
      auto ps = std::span<const double>(p.data(), static_cast<std::size_t>(w.d));
      if (w.contains(ps)) out.push_back(ps);
    }
  });
}

void sample_vibrating(PointConfiguration& out, int k, Engine& rng) {
  const Window& w = out.window();
  const double amp = 1.0 / k;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> vib(-amp, amp);
  const double shift = u01(rng);
  const long lo = static_cast<long>(std::ceil(-w.half() - shift - amp));
  const long hi = static_cast<long>(std::floor(w.half() - shift + amp));
  for (long m = lo; m <= hi; ++m) {
    const double x = static_cast<double>(m) + shift + vib(rng);
    if (w.contains({&x, 1})) out.push_back({&x, 1});
  }
}

void sample_renewal(PointConfiguration& out, const GapLaw& gap, Engine& rng) {
  const Window& w = out.window();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Equilibrium forward recurrence time: uniform fraction of a size-biased gap.
  double x = -w.half() + u01(rng) * gap.draw_size_biased(rng);
  while (x <= w.half()) {
    out.push_back({&x, 1});
    x += gap.draw(rng);
  }
}

}  // namespace

PointConfiguration sample(const ProcessModel& model, const Window& window, Seed seed) {
  if (model.d != window.d) throw ArgumentError("sample: model and window dimensions differ");
  if (!(window.R > 0.0)) throw DomainError("sample: window side must be positive");
  if ((model.kind == ProcessModel::Kind::VibratingLattice || model.kind == ProcessModel::Kind::Renewal) &&
      model.d != 1)
    throw ArgumentError("sample: vibrating lattice and renewal processes are one-dimensional");
  Engine rng = make_engine(seed);
  PointConfiguration out(window);
  switch (model.kind) {
    case ProcessModel::Kind::Poisson: sample_poisson(out, rng); break;
    case ProcessModel::Kind::Lattice: sample_lattice(out, rng); break;
    case ProcessModel::Kind::BernoulliBlock: sample_block(out, model.k, rng); break;
    case ProcessModel::Kind::VibratingLattice: sample_vibrating(out, model.k, rng); break;
    case ProcessModel::Kind::Renewal: sample_renewal(out, model.gap, rng); break;
  }
  return out;
}

// ------------------------------------------------------------------ rho2

double Rho2Analytic::operator()(double v) const { return density(std::span<const double>(&v, 1)); }

std::vector<double> Rho2Analytic::atoms_within(double r) const {
  std::vector<double> out;
  if (!lattice_atoms) return out;
  for (long j = 1; j <= static_cast<long>(std::floor(r)); ++j) out.push_back(static_cast<double>(j));
  return out;
}

double gamma_renewal_rho2(double theta, double x) {
  if (x <= 0.0) {
    if (theta < 1.0) return std::numeric_limits<double>::infinity();
    return theta == 1.0 ? 1.0 : 0.0;
  }
  auto term = [&](long j) { return theta * boost::math::gamma_p_derivative(static_cast<double>(j) * theta, theta * x); };
  const long centre = std::max(1L, std::lround(x));
  double sum = term(centre);
  for (long j = centre + 1;; ++j) {
    const double t = term(j);
    sum += t;
    if (t <= 1e-17 * sum && j > centre + 3) break;
  }
  for (long j = centre - 1; j >= 1; --j) {
    const double t = term(j);
    sum += t;
    if (t <= 1e-17 * sum && j < centre - 3) break;
  }
  return sum;
}

Rho2Grid renewal_rho2_by_convolution(const GapLaw& gap, const Rho2Options& options) {
  if (!(options.h > 0.0) || !(options.v_max > 0.0))
    throw ArgumentError("rho2 grid: resolution and extent must be positive");
  const double h = options.h;
  const auto n = static_cast<std::size_t>(std::llround(options.v_max / h));
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = gap.pdf(static_cast<double>(i) * h);
  if (!std::isfinite(f[0])) f[0] = 0.0;  // integrable singularity: drop the node
  std::size_t f_lo = 0, f_hi = n;
  while (f_lo < n && f[f_lo] == 0.0) ++f_lo;
  while (f_hi > f_lo && f[f_hi] < 1e-300) --f_hi;

  Rho2Grid out;
  out.h = h;
  out.values.assign(n + 1, 0.0);
  std::vector<double> power = f;  // f^{*j}
  std::vector<double> next(n + 1);
  const int j_max = static_cast<int>(std::ceil(2.0 * options.v_max));
  for (int j = 1; j <= j_max; ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      out.values[i] += power[i];
      mass += (i == 0 || i == n ? 0.5 : 1.0) * power[i] * h;
    }
    out.terms = j;
    if (mass < options.tail_tol && j > 1) break;
    // Trapezoidal convolution next(x_i) = int_0^{x_i} power(x_i - y) f(y) dy.
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i < f_lo) continue;
      const std::size_t m_hi = std::min(i, f_hi);
      double acc = 0.0;
      for (std::size_t m = f_lo; m <= m_hi; ++m) {
        const double w = (m == 0 || m == i) ? 0.5 : 1.0;
        acc += w * power[i - m] * f[m];
      }
      next[i] = acc * h;
    }
    power.swap(next);
  }
  const auto last_unit = static_cast<std::size_t>(std::llround(std::min(1.0, options.v_max) / h));
  for (std::size_t i = n - last_unit; i <= n; ++i)
    out.tail_deviation = std::max(out.tail_deviation, std::abs(out.values[i] - 1.0));
  return out;
}

double unit_ball_radius(int d) {
  switch (d) {
    case 1: return 0.5;
    case 2: return 1.0 / std::sqrt(std::numbers::pi);
    case 3: return std::cbrt(3.0 / (4.0 * std::numbers::pi));
    default: throw ArgumentError("unit_ball_radius: dimension must be 1, 2 or 3");
  }
}

Rho2Analytic hardcore_candidate(int d) {
  const double r = unit_ball_radius(d);
  Rho2Analytic rho;
  rho.d = d;
  rho.density = [r](std::span<const double> v) { return norm(v) <= r ? 0.0 : 1.0; };
  rho.support_radius = r;
  rho.radial = true;
  rho.breakpoints = [r](double upto) { return upto >= r ? std::vector<double>{r} : std::vector<double>{}; };
  rho.label = "hardcore";
  return rho;
}

namespace {

std::vector<double> no_breakpoints(double) { return {}; }

// Smallest radius beyond which |rho_2 - 1| stays below tol on a fine scan.
double decay_radius(const std::function<double(double)>& rho, double tol) {
  double x = 8.0;
  for (; x < 8192.0; x *= 1.25) {
    double dev = 0.0;
    for (int i = 0; i <= 64; ++i) dev = std::max(dev, std::abs(rho(x + i / 16.0) - 1.0));
    if (dev < tol) return std::ceil(x);
  }
  throw DivergenceError("renewal rho_2 does not settle to 1 within 8192 mean gaps");
}

}  // namespace

Rho2Analytic rho2_analytic(const ProcessModel& model, const Rho2Options& options) {
  if (!(options.h > 0.0) || !(options.v_max > 0.0))
    throw ArgumentError("rho2_analytic: grid resolution and extent must be positive");
  Rho2Analytic rho;
  rho.d = model.d;
  rho.breakpoints = no_breakpoints;
  rho.label = model.descriptor();
  switch (model.kind) {
    case ProcessModel::Kind::Poisson:
      rho.density = [](std::span<const double>) { return 1.0; };
      rho.support_radius = 0.0;
      rho.radial = true;
      break;
    case ProcessModel::Kind::Lattice:
      rho.density = [](std::span<const double>) { return 0.0; };
      rho.lattice_atoms = true;
      rho.decays = false;
      break;
    case ProcessModel::Kind::BernoulliBlock: {
      const double k = model.k;
      const double deficit = std::pow(k, -model.d);
      rho.density = [k, deficit](std::span<const double> v) {
        double overlap = 1.0;
        for (double x : v) overlap *= std::max(0.0, 1.0 - std::abs(x) / k);
        return 1.0 - deficit * overlap;
      };
      rho.support_radius = k;
      rho.breakpoints = [k](double r) { return r >= k ? std::vector<double>{k} : std::vector<double>{}; };
      break;
    }
    case ProcessModel::Kind::VibratingLattice: {
      const int k = model.k;
      const double a = 2.0 / k;
      rho.density = [k, a](std::span<const double> v) {
        const double x = v[0];
        double acc = 0.0;
        for (long j = static_cast<long>(std::floor(x - a)); j <= static_cast<long>(std::ceil(x + a)); ++j)
          if (j != 0) acc += vibration_hat(k, x - static_cast<double>(j));
        return acc;
      };
      rho.decays = false;
      rho.breakpoints = [a](double r) {
        std::vector<double> pts;
        for (long j = 1; static_cast<double>(j) - a <= r; ++j)
          for (double p : {static_cast<double>(j) - a, static_cast<double>(j), static_cast<double>(j) + a})
            if (p > 0.0 && p <= r) pts.push_back(p);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
      };
      break;
    }
    case ProcessModel::Kind::Renewal: {
      const GapLaw gap = model.gap;
      if (gap.kind == GapLaw::Kind::Exponential) {
        rho.density = [](std::span<const double>) { return 1.0; };
        rho.support_radius = 0.0;
        break;
      }
      if (gap.kind == GapLaw::Kind::Gamma) {
        const double theta = gap.shape;
        auto f = [theta](double x) { return gamma_renewal_rho2(theta, std::abs(x)); };
        rho.density = [f](std::span<const double> v) { return f(v[0]); };
        rho.small_distance_exponent = theta - 1.0;
        rho.support_radius = decay_radius(f, options.tail_tol);
        break;
      }
      auto grid = std::make_shared<Rho2Grid>(renewal_rho2_by_convolution(gap, options));
      const double v_max = static_cast<double>(grid->values.size() - 1) * grid->h;
      rho.density = [grid, v_max](std::span<const double> v) {
        const double x = std::abs(v[0]);
        if (x >= v_max) return 1.0;
        const double pos = x / grid->h;
        const auto i = static_cast<std::size_t>(pos);
        const double t = pos - static_cast<double>(i);
        return (1.0 - t) * grid->values[i] + t * grid->values[i + 1];
      };
      rho.support_radius = v_max;
      rho.decays = grid->tail_deviation < 1e-6;
      const auto [lo, hi] = gap.support();
      rho.breakpoints = [lo, hi](double r) {
        std::vector<double> pts;
        for (long j = 1; j * lo <= r && j <= 4 * static_cast<long>(r) + 4; ++j)
          for (double p : {j * lo, static_cast<double>(j), j * hi})
            if (p > 0.0 && p <= r) pts.push_back(p);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
      };
      break;
    }
  }
  return rho;
}

}  // namespace rieszlab
