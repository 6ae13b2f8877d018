#include <cmath>
#include <vector>

#include "doctest.h"
#include "rieszlab/error.hpp"
#include "rieszlab/lpx.hpp"

using namespace rieszlab;

TEST_CASE("DCT-IV is its own inverse up to 2n") {
  const std::vector<double> x = {0.3, -1.0, 2.5, 0.0, 4.0, -0.25, 1.0, 7.0};
  const auto y = dct_iv(dct_iv(x));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(16.0 * x[i]).epsilon(1e-13));
}

TEST_CASE("discretization grid") {
  const auto disc = Discretization::make(4.0, 0.25, 8.0);
  CHECK(disc.n == 16);
  CHECK(disc.n_freq() == 64);
  CHECK(disc.cell_center(0) == doctest::Approx(0.125));
  CHECK(disc.frequency(0) == doctest::Approx(0.5 / 32.0));
  CHECK_THROWS_AS(Discretization::make(4.0, 0.3, 8.0), ArgumentError);
  CHECK_THROWS_AS(Discretization::make(4.0, 0.25, 2.0), ArgumentError);
}

TEST_CASE("cosine transform of a narrow box") {
  // T = 1 on [-h, h]: the transform is sin(2 pi xi h) / (pi xi).
  const auto disc = Discretization::make(8.0, 1.0 / 32.0, 8.0);
  std::vector<double> values(disc.n, 0.0);
  values[0] = 1.0;
  const auto t = cosine_transform(values, disc);
  const double h = disc.h();
  for (std::size_t m : {0, 10, 100}) {
    const double xi = disc.frequency(m);
    CHECK(t[m] == doctest::Approx(std::sin(2 * M_PI * xi * h) / (M_PI * xi)).epsilon(1e-3));
  }
}

TEST_CASE("objective weights integrate the tented kernel") {
  const auto disc = Discretization::make(2.0, 0.5, 4.0);
  const auto c = objective_weights(disc, Kernel::riesz(1, 0.5));
  // 2 * integral over [0, 1/2] of v^{-1/2} (1 - v/4) = 2 (sqrt 2 - (1/6) 2^{-3/2}).
  CHECK(c[0] == doctest::Approx(2.0 * (std::sqrt(2.0) - std::pow(0.5, 1.5) / 6.0)).epsilon(1e-12));
}

TEST_CASE("hardcore candidate is feasible with the predicted objective") {
  for (double R : {64.0, 512.0}) {
    const auto disc = Discretization::make(16.0, 1.0 / 16.0, R);
    const auto hc = evaluate_candidate(hardcore_values(disc), disc, Kernel::log1d(), true);
    CHECK(hc.feasible_direct);
    CHECK(hc.feasible_fourier);
    CHECK(std::abs(hc.neutrality_residual) <= 1e-12);
    const double predicted = -1.0 - std::log(2.0) + (2.0 / R) * (1.0 / 16.0 + std::log(2.0) / 8.0);
    CHECK(hc.objective == doctest::Approx(predicted).epsilon(1e-10));
  }
}

TEST_CASE("projected descent improves on the references and stays feasible") {
  const auto disc = Discretization::make(16.0, 1.0 / 16.0, 64.0);
  SolverOptions options;
  options.iterations = 60;
  for (const auto& kernel : {Kernel::log1d(), Kernel::riesz(1, 0.5)}) {
    const bool neutral = kernel.is_log();
    const auto hc = evaluate_candidate(hardcore_values(disc), disc, kernel, neutral);
    const auto best = minimize_t2(disc, kernel, options);
    CHECK(best.objective <= hc.objective + 1e-3);
    CHECK(best.max_violation <= 1e-6);
    CHECK(best.best_objective_trace.size() == 60);
    for (std::size_t t = 1; t < best.best_objective_trace.size(); ++t)
      CHECK(best.best_objective_trace[t] <= best.best_objective_trace[t - 1]);

    // Between the sampled frequencies the transform dips at most by the reported bound.
    auto fine = disc;
    fine.oversample = 16;
    std::vector<double> values(best.values.begin(), best.values.begin() + static_cast<long>(disc.n));
    const auto refined = evaluate_candidate(values, fine, kernel, neutral);
    CHECK(refined.fourier_violation <= best.fourier_gap_bound);
  }
}
