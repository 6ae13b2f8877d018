#include <boost/math/special_functions/zeta.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rieszlab/energy.hpp"
#include "rieszlab/error.hpp"

using namespace rieszlab;

TEST_CASE("background integrals in closed form") {
  // bb = 2 (R G(R) - M(R)) and pb(p) = G(R/2 + p) + G(R/2 - p).
  const auto k = Kernel::log1d();
  const BackgroundIntegrals bg(k, 2.0);
  const double G = 2.0 - 2.0 * std::log(2.0), M = 1.0 - 2.0 * std::log(2.0);
  CHECK(bg.bb() == doctest::Approx(2.0 * (2.0 * G - M)).epsilon(1e-13));
  const double p = 0.25;
  const double pb = k.primitive(1.0 + p) + k.primitive(1.0 - p);
  CHECK(bg.pb(std::span<const double>(&p, 1)) == doctest::Approx(pb).epsilon(1e-13));
}

TEST_CASE("single point energy") {
  PointConfiguration c(Window(2.0, 1));
  const double x = 0.0;
  c.push_back(std::span<const double>(&x, 1));
  const auto k = Kernel::log1d();
  const double expected = -2.0 * 2.0 * k.primitive(1.0) + BackgroundIntegrals(k, 2.0).bb();
  CHECK(hint_R(c, 2.0, k) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(hint_R(c, 2.0, k) == doctest::Approx(2.0 - 4.0 * std::log(2.0)).epsilon(1e-12));
  c.push_back(std::span<const double>(&x, 1));
  CHECK_THROWS_AS(hint_R(c, 2.0, k), SingularityError);
}

TEST_CASE("lattice series converges to the lattice energies") {
  const std::vector<double> R = {64, 128, 256, 512, 1024};
  const auto log_series = wint_lattice_series(Kernel::log1d(), R);
  CHECK(std::abs(log_series.extrapolated + std::log(2.0 * M_PI)) <= 1e-8);
  CHECK(std::abs(log_series.extrapolated + std::log(2.0 * M_PI)) <= log_series.extrapolation_error);
  const auto riesz = wint_lattice_series(Kernel::riesz(1, 0.5), R);
  CHECK(std::abs(riesz.extrapolated - 2.0 * boost::math::zeta(0.5)) <= 1e-8);
  // The extrapolated value stays within the last three iterates widened by the error.
  const auto& it = riesz.richardson_iterates;
  const double lo = std::min({it[it.size() - 1], it[it.size() - 2], it[it.size() - 3]});
  const double hi = std::max({it[it.size() - 1], it[it.size() - 2], it[it.size() - 3]});
  CHECK(riesz.extrapolated >= lo - riesz.extrapolation_error);
  CHECK(riesz.extrapolated <= hi + riesz.extrapolation_error);
}

TEST_CASE("rho2 route on Bernoulli blocks") {
  const std::vector<double> R = {16, 32, 64, 128, 256};
  const auto bb4 = rho2_analytic(ProcessModel::bernoulli_block(1, 4));
  // Compact perturbation: the limit is the untented integral, log 4 - 3/2 for k = 4.
  CHECK(wint_rho2_limit(bb4, Kernel::log1d()) == doctest::Approx(std::log(4.0) - 1.5).epsilon(1e-10));
  CHECK(wint_rho2_limit(bb4, Kernel::riesz(1, 0.5)) == doctest::Approx(-4.0 / 3.0).epsilon(1e-10));
  const auto route = wint_from_rho2(bb4, Kernel::log1d(), R);
  CHECK(route.extrapolated == doctest::Approx(std::log(4.0) - 1.5).epsilon(1e-6));
  CHECK(route.rate_constant > 0.0);
}

TEST_CASE("rho2 route on the vibrating lattice and Gamma renewal") {
  const std::vector<double> R = {64, 128, 256, 512, 1024};
  const auto vl4 = rho2_analytic(ProcessModel::vibrating_lattice(4));
  // Oracles: the same route on the ladder R = 2^10 .. 2^16, frozen.
  CHECK(std::abs(wint_from_rho2(vl4, Kernel::log1d(), R).extrapolated - (-1.766868781743)) <= 1e-8);
  CHECK(std::abs(wint_from_rho2(vl4, Kernel::riesz(1, 0.5), R).extrapolated - (-2.876088982508)) <= 1e-8);
  // k = 2: the hats tile the line, leaving rho2 - 1 = -(1 - |v|)_+ with limits -3/2 and -8/3.
  const auto vl2 = rho2_analytic(ProcessModel::vibrating_lattice(2));
  CHECK(wint_from_rho2(vl2, Kernel::log1d(), R).extrapolated == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(wint_from_rho2(vl2, Kernel::riesz(1, 0.5), R).extrapolated == doctest::Approx(-8.0 / 3.0).epsilon(1e-12));

  const auto g2 = rho2_analytic(ProcessModel::renewal(GapLaw::gamma(2.0)));
  // rho2 - 1 = -exp(-4x): 2 * integral of x^{-1/2} (-exp(-4x)) = -sqrt(pi).
  CHECK(wint_rho2_limit(g2, Kernel::riesz(1, 0.5)) == doctest::Approx(-std::sqrt(M_PI)).epsilon(1e-8));
  // 2 * integral of log(x) exp(-4x) = -(gamma + log 4) / 2.
  CHECK(wint_rho2_limit(g2, Kernel::log1d()) ==
        doctest::Approx(-(0.57721566490153286 + std::log(4.0)) / 2.0).epsilon(1e-8));
}

TEST_CASE("divergent kernels are reported") {
  const auto g05 = rho2_analytic(ProcessModel::renewal(GapLaw::gamma(0.5)));
  CHECK_THROWS_AS(wint_rho2_limit(g05, Kernel::riesz(1, 0.5)), DivergenceError);
}

TEST_CASE("Borodin-Serfaty energy of the hardcore candidate") {
  CHECK(wbs_energy(hardcore_candidate(1), Kernel::log1d(), 4.0) == doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(wbs_energy(rho2_analytic(ProcessModel::lattice(1)), Kernel::log1d(), 4.0), NotApplicableError);
}

TEST_CASE("Monte Carlo route") {
  const std::vector<double> R = {16, 32, 64, 128};
  const auto vl = wint_monte_carlo(ProcessModel::vibrating_lattice(4), Kernel::riesz(1, 0.5), R, 60, 4);
  CHECK(vl.replicas_used == 60);
  CHECK(std::abs(vl.extrapolated - (-2.876088982508)) <=
        4.0 * vl.extrapolated_std_error + vl.extrapolation_error + 1e-3);
  const auto again = wint_monte_carlo(ProcessModel::vibrating_lattice(4), Kernel::riesz(1, 0.5), R, 60, 4);
  CHECK(again.extrapolated == vl.extrapolated);
  CHECK_THROWS_AS(wint_monte_carlo(ProcessModel::poisson(1), Kernel::log1d(), R, 10, 4), ArgumentError);
}
