#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rieszlab/error.hpp"
#include "rieszlab/onedim.hpp"
#include "rieszlab/parallel.hpp"

using namespace rieszlab;

namespace {

std::vector<PointConfiguration> draw(const ProcessModel& m, double L, std::size_t n, std::uint64_t seed) {
  const Window w(L, 1);
  return parallel_map<PointConfiguration>(n, [&](std::size_t i) { return sample(m, w, Seed{seed, i}); });
}

double gamma_ers(double theta) {
  return 1.0 - theta + std::log(theta) - std::lgamma(theta) - (1.0 - theta) * boost::math::digamma(theta);
}

std::vector<NeighborDensity> densities(const ProcessModel& m, int k_max) {
  const auto samples = draw(m, 128.0, 200, 17);
  std::vector<NeighborDensity> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(kth_neighbor_density(samples, k, 128.0, 24.0, 480));
  return out;
}

}  // namespace

TEST_CASE("Poisson neighbor densities are Gamma(k, 1)") {
  const auto samples = draw(ProcessModel::poisson(1), 128.0, 300, 7);
  for (int k : {1, 2, 3}) {
    const auto nd = kth_neighbor_density(samples, k, 128.0, 16.0, 64);
    CHECK(nd.total_mass == doctest::Approx(1.0).epsilon(0.02));
    CHECK(nd.mean_position == doctest::Approx(k).epsilon(0.03));
    for (std::size_t i = 0; i < nd.values.size(); ++i) {
      const double x = nd.centers[i];
      const double pdf = std::pow(x, k - 1) * std::exp(-x) / std::tgamma(k);
      CHECK(std::abs(nd.values[i] - pdf) <= 5.0 * nd.std_error[i] + 0.01);
    }
  }
  CHECK_THROWS_AS(kth_neighbor_density(samples, 1, 128.0, 200.0, 10), DomainError);
}

TEST_CASE("crystallization gap") {
  std::vector<NeighborDensity> lattice;
  for (int k = 1; k <= 8; ++k) lattice.push_back(NeighborDensity::lattice(k, 16.0, 160));
  const auto zero = crystallization_gap(lattice, 0.5, 8);
  CHECK(zero.value == 0.0);
  CHECK(zero.truncation_bound == 0.0);

  const auto vl8 = crystallization_gap(densities(ProcessModel::vibrating_lattice(8), 8), 0.5, 8);
  const auto vl4 = crystallization_gap(densities(ProcessModel::vibrating_lattice(4), 8), 0.5, 8);
  const auto poi = crystallization_gap(densities(ProcessModel::poisson(1), 8), 0.5, 8);
  CHECK(vl8.value > 0.0);
  CHECK(vl8.value + 3.0 * vl8.std_error < vl4.value - 3.0 * vl4.std_error);
  CHECK(vl4.value + 3.0 * vl4.std_error < poi.value - 3.0 * poi.std_error);
  CHECK_THROWS_AS(crystallization_gap(lattice, 0.5, 9), ArgumentError);
}

TEST_CASE("renewal entropy rates") {
  CHECK(std::abs(renewal_entropy_rate(GapLaw::exponential())) <= 1e-8);
  for (double theta : {0.5, 2.0, 4.0, 64.0})
    CHECK(renewal_entropy_rate(GapLaw::gamma(theta)) == doctest::Approx(gamma_ers(theta)).epsilon(1e-8));
  double previous = -1.0;
  for (int k : {2, 3, 4, 8, 16}) {
    const double v = renewal_entropy_rate(GapLaw::uniform_hat(k));
    CHECK(v == doctest::Approx(0.5 + std::log(k / 2.0)).epsilon(1e-8));
    CHECK(v > previous);
    previous = v;
  }
}

TEST_CASE("free energy along the Gamma family") {
  const std::vector<double> grid = {0.5, 0.75, 1, 1.25, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  const auto kernel = Kernel::riesz(1, 0.5);
  const auto low = free_energy_scan(0.01, kernel, grid);
  CHECK(low.argmin_theta >= low.bracket_lo);
  CHECK(low.argmin_theta <= low.bracket_hi);
  CHECK(low.bracket_lo <= 1.0);
  CHECK(low.bracket_hi >= 1.0);
  CHECK(low.wint_monotone);
  CHECK(low.ers_unimodal);
  CHECK_FALSE(low.entries.front().feasible);  // theta = 1/2 makes the Riesz integral diverge

  const auto entry = free_energy_at(1.0, kernel, 2.0);
  CHECK(entry.wint == doctest::Approx(-std::sqrt(M_PI)).epsilon(1e-7));
  CHECK(entry.f == doctest::Approx(entry.wint + entry.ers));

  const std::vector<double> bad = {0.5, 2.0};
  CHECK_THROWS_AS(free_energy_scan(1.0, kernel, bad), ArgumentError);
  CHECK_THROWS_AS(free_energy_scan(-1.0, kernel, grid), ArgumentError);
}
