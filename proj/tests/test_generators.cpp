#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rieszlab/error.hpp"
#include "rieszlab/generators.hpp"
#include "rieszlab/parallel.hpp"
#include "rieszlab/quadrature.hpp"

using namespace rieszlab;

namespace {

double mean_count(const ProcessModel& m, double R, std::size_t n) {
  const Window w(R, m.d);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(sample(m, w, Seed{11, i}).size());
  return total / static_cast<double>(n) / w.volume();
}

}  // namespace

TEST_CASE("every model has intensity one") {
  CHECK(mean_count(ProcessModel::poisson(1), 50.0, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::poisson(2), 8.0, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::lattice(1), 10.5, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::bernoulli_block(1, 3), 20.0, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::bernoulli_block(2, 2), 8.0, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::vibrating_lattice(4), 20.5, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::renewal(GapLaw::gamma(4.0)), 50.0, 400) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(mean_count(ProcessModel::renewal(GapLaw::uniform_hat(3)), 50.0, 400) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("lattice samples are unit-spaced and vibrations are bounded") {
  const auto lat = sample(ProcessModel::lattice(1), Window(20.0, 1), Seed{3, 0});
  std::vector<double> xs = lat.coords();
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(1.0).epsilon(1e-12));

  const auto vib = sample(ProcessModel::vibrating_lattice(8), Window(40.0, 1), Seed{3, 1});
  xs = vib.coords();
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) {
    CHECK(xs[i] - xs[i - 1] >= 1.0 - 2.0 / 8.0 - 1e-12);
    CHECK(xs[i] - xs[i - 1] <= 1.0 + 2.0 / 8.0 + 1e-12);
  }
}

TEST_CASE("a Bernoulli block holds exactly k^d points per interior tile") {
  // With window side a multiple of k the tiles partition it up to the shift;
  // the count over the whole window fluctuates only through the two cut tiles.
  for (std::size_t rep = 0; rep < 20; ++rep) {
    const auto c = sample(ProcessModel::bernoulli_block(1, 3), Window(30.0, 1), Seed{5, rep});
    CHECK(c.size() >= 24);
    CHECK(c.size() <= 36);
  }
}

TEST_CASE("samples are reproducible") {
  const auto m = ProcessModel::renewal(GapLaw::gamma(2.0));
  const auto a = sample(m, Window(30.0, 1), Seed{9, 2});
  const auto b = sample(m, Window(30.0, 1), Seed{9, 2});
  CHECK(a.coords() == b.coords());
  CHECK_THROWS_AS(sample(ProcessModel::poisson(2), Window(3.0, 1), Seed{}), ArgumentError);
}

TEST_CASE("gap laws have mean one and the stated variance") {
  for (const auto& g : {GapLaw::exponential(), GapLaw::gamma(0.5), GapLaw::gamma(4.0), GapLaw::uniform_hat(4)}) {
    const auto [lo, hi] = g.support();
    auto moment = [&](int p) {
      auto f = [&](double x) { return std::pow(x, p) * g.pdf(x); };
      if (std::isinf(hi)) return quad::endpoint_singular(f, lo, 1.0) + quad::half_line(f, 1.0);
      return quad::adaptive(f, lo, 1.0) + quad::adaptive(f, 1.0, hi);
    };
    CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(moment(1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(moment(2) - 1.0 == doctest::Approx(g.variance()).epsilon(1e-8));
  }
  CHECK(GapLaw::uniform_hat(4).variance() == doctest::Approx(2.0 / 3.0 / 16.0));
  CHECK_THROWS_AS(GapLaw::uniform_hat(1), ArgumentError);
  CHECK_THROWS_AS(GapLaw::gamma(-1.0), ArgumentError);
}

TEST_CASE("analytic rho2 of the reference models") {
  const auto poisson = rho2_analytic(ProcessModel::poisson(1));
  CHECK(poisson(0.3) == doctest::Approx(1.0));

  // Bernoulli block k: 1 - (k - |v|) / k^2 for |v| < k, 1 beyond.
  const auto bb = rho2_analytic(ProcessModel::bernoulli_block(1, 4));
  CHECK(bb(1.0) == doctest::Approx(1.0 - 0.75 / 4.0));
  CHECK(bb(5.0) == doctest::Approx(1.0));

  const auto lat = rho2_analytic(ProcessModel::lattice(1));
  CHECK(lat.lattice_atoms);
  CHECK(lat.atoms_within(3.5).size() == 3);
  CHECK_FALSE(lat.decays);

  // Vibrating lattice: hat of support [-2/k, 2/k] around each nonzero integer.
  const auto vib = rho2_analytic(ProcessModel::vibrating_lattice(4));
  CHECK(vib(1.0) == doctest::Approx(2.0));  // peak height k/2
  CHECK(vib(0.4) == doctest::Approx(0.0));
  CHECK(vibration_hat(4, 0.25) == doctest::Approx(1.0));
  CHECK(quad::adaptive([](double x) { return vibration_hat(4, x); }, -0.5, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("renewal rho2 by convolution agrees with the Gamma closed form") {
  Rho2Options opt;
  opt.h = 1.0 / 512.0;
  opt.v_max = 12.0;
  const auto grid = renewal_rho2_by_convolution(GapLaw::gamma(2.0), opt);
  for (double x : {0.5, 1.0, 2.5, 7.0}) {
    const auto i = static_cast<std::size_t>(std::lround(x / grid.h));
    CHECK(grid.values[i] == doctest::Approx(gamma_renewal_rho2(2.0, x)).epsilon(2e-3));
  }
  // Gamma(2): rho2(x) = 1 - exp(-4x).
  CHECK(gamma_renewal_rho2(2.0, 0.3) == doctest::Approx(1.0 - std::exp(-1.2)).epsilon(1e-12));
  CHECK(gamma_renewal_rho2(1.0, 0.7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma_renewal_rho2(4.0, 60.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hardcore candidate") {
  CHECK(unit_ball_radius(1) == doctest::Approx(0.5));
  CHECK(unit_ball_radius(2) == doctest::Approx(1.0 / std::sqrt(M_PI)));
  const auto hc = hardcore_candidate(1);
  CHECK(hc(0.3) == doctest::Approx(0.0));
  CHECK(hc(0.7) == doctest::Approx(1.0));
  CHECK(hc.support_radius == doctest::Approx(0.5));
}
