// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <boost/math/special_functions/zeta.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rieszlab/cli.hpp"
#include "rieszlab/energy.hpp"
#include "rieszlab/estimators.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/lpx.hpp"
#include "rieszlab/onedim.hpp"
#include "rieszlab/parallel.hpp"

using namespace rieszlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fmt(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

const std::vector<double> kLadder = {16, 32, 64, 128, 256};
const std::vector<double> kRho2Ladder = {64, 128, 256, 512, 1024};

std::vector<PointConfiguration> draw(const ProcessModel& m, double R, std::size_t n, std::uint64_t seed) {
  const Window w(R, m.d);
  return parallel_map<PointConfiguration>(n, [&](std::size_t i) { return sample(m, w, Seed{seed, i}); });
}

void ac1(Outcome& o) {
  for (const auto& kernel : {Kernel::log1d(), Kernel::riesz(1, 0.5)}) {
    const auto r = wint_monte_carlo(ProcessModel::poisson(1), kernel, kLadder, 400, 101);
    const double tol = 3.0 * r.extrapolated_std_error + r.extrapolation_error;
    o.detail << kernel.name() << ": " << fmt(r.extrapolated) << " tol " << fmt(tol, 3) << "; ";
    o.require(std::abs(r.extrapolated) <= tol, kernel.name() + " Poisson energy not zero");
  }
}

void ac2(Outcome& o) {
  struct Case {
    ProcessModel model;
    std::size_t replicas;
  };
  const std::vector<Case> cases = {{ProcessModel::bernoulli_block(1, 2), 20000},
                                   {ProcessModel::bernoulli_block(1, 4), 20000},
                                   {ProcessModel::vibrating_lattice(4), 2000},
                                   {ProcessModel::vibrating_lattice(8), 2000}};
  for (const auto& c : cases) {
    for (const auto& kernel : {Kernel::log1d(), Kernel::riesz(1, 0.5)}) {
      const auto mc = wint_monte_carlo(c.model, kernel, kLadder, c.replicas, 202);
      const auto q = wint_from_rho2(rho2_analytic(c.model), kernel, kRho2Ladder);
      const double diff = std::abs(mc.extrapolated - q.extrapolated);
      const double combined = 3.0 * mc.extrapolated_std_error + mc.extrapolation_error + q.extrapolation_error;
      const double rel = diff / std::abs(q.extrapolated);
      const auto tag = c.model.descriptor() + "/" + kernel.name();
      o.detail << tag << " mc " << fmt(mc.extrapolated) << " quad " << fmt(q.extrapolated) << " rel "
               << fmt(rel, 2) << "; ";
      o.require(diff <= combined, tag + " outside combined error " + fmt(combined, 3));
      o.require(rel <= 0.05, tag + " relative disagreement above 5%");
    }
  }
}

void ac3(Outcome& o) {
  const std::vector<ProcessModel> models = {ProcessModel::poisson(1),
                                            ProcessModel::lattice(1),
                                            ProcessModel::bernoulli_block(1, 2),
                                            ProcessModel::bernoulli_block(2, 2),
                                            ProcessModel::vibrating_lattice(4),
                                            ProcessModel::renewal(GapLaw::gamma(2.0)),
                                            ProcessModel::renewal(GapLaw::uniform_hat(4)),
                                            ProcessModel::poisson(2)};
  double worst = 0.0;
  for (const auto& m : models) {
    const double R = m.d == 1 ? 64.0 : 12.0;
    const auto check = discrepancy_identity_check(draw(m, R, 500, 303), R);
    worst = std::max(worst, std::abs(check.gap));
  }
  o.detail << "max algebraic gap " << fmt(worst, 3) << "; ";
  o.require(worst <= 1e-8, "algebraic gap above 1e-8");

  const std::vector<double> R = {4, 8, 16, 32, 64};
  const auto curve = number_variance_curve(ProcessModel::poisson(1), R, 20000, 304);
  const auto& at64 = curve.entries.back();
  o.detail << "Poisson E[D^2]/R at 64 = " << fmt(at64.mean_sq / 64.0, 4) << " +- " << fmt(at64.std_error / 64.0, 2);
  o.require(std::abs(at64.mean_sq / 64.0 - 1.0) <= 0.05, "Poisson normalized variance outside 1 +- 0.05");
}

void ac4(Outcome& o) {
  const std::vector<double> R = {4, 8, 16, 32, 64, 128};
  const auto poisson = number_variance_curve(ProcessModel::poisson(1), R, 2000, 404);
  const auto block = number_variance_curve(ProcessModel::bernoulli_block(1, 2), R, 2000, 404);
  const auto lattice = number_variance_curve(ProcessModel::lattice(1), R, 2000, 404);
  double lattice_max = 0.0;
  for (const auto& e : lattice.entries) lattice_max = std::max(lattice_max, e.mean_sq);
  o.detail << "exponents Poisson " << fmt(poisson.fitted_exponent, 4) << ", block " << fmt(block.fitted_exponent, 3)
           << "; lattice max E[D^2] " << fmt(lattice_max, 3) << "; ";
  o.require(std::abs(poisson.fitted_exponent - 1.0) <= 0.1, "Poisson exponent");
  o.require(block.fitted_exponent <= 0.2, "Bernoulli block exponent");
  o.require(lattice_max <= 1.0, "lattice variance bound");

  const auto d_poisson = dlog_from_variance(poisson, 1);
  const auto d_block = dlog_from_variance(block, 1);
  o.detail << "D^log Poisson " << to_string(d_poisson.trend) << ", block " << to_string(d_block.trend);
  o.require(d_poisson.trend == DlogTrend::Diverging, "Poisson D^log not diverging");
  o.require(d_block.trend == DlogTrend::Vanishing, "block D^log not vanishing");
}

void ac5(Outcome& o) {
  const auto kernel = Kernel::riesz(1, 0.5);
  const auto lattice = wint_lattice_series(kernel, kRho2Ladder);
  const auto vl8 = wint_monte_carlo(ProcessModel::vibrating_lattice(8), kernel, kLadder, 2000, 505);
  const auto vl4 = wint_monte_carlo(ProcessModel::vibrating_lattice(4), kernel, kLadder, 2000, 506);
  const auto poisson = wint_monte_carlo(ProcessModel::poisson(1), kernel, kLadder, 400, 507);
  struct Item {
    const char* name;
    double value, sigma, bias;
  };
  const std::vector<Item> chain = {
      {"P_Z", lattice.extrapolated, 0.0, lattice.extrapolation_error},
      {"VL8", vl8.extrapolated, vl8.extrapolated_std_error, vl8.extrapolation_error},
      {"VL4", vl4.extrapolated, vl4.extrapolated_std_error, vl4.extrapolation_error},
      {"Poisson", poisson.extrapolated, poisson.extrapolated_std_error, poisson.extrapolation_error}};
  for (const auto& it : chain) o.detail << it.name << " " << fmt(it.value) << "; ";
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const auto& a = chain[i];
    const auto& b = chain[i + 1];
    const double sep = 3.0 * std::hypot(a.sigma, b.sigma) + a.bias + b.bias;
    o.require(b.value - a.value > sep, std::string(a.name) + " < " + b.name + " not separated by 3 sigma");
  }

  std::vector<double> gaps;
  std::vector<double> sigmas;
  std::vector<NeighborDensity> exact;
  for (int k = 1; k <= 16; ++k) exact.push_back(NeighborDensity::lattice(k, 32.0, 640));
  const auto zero = crystallization_gap(exact, 0.5, 16);
  gaps.push_back(zero.value);
  sigmas.push_back(0.0);
  for (const auto& m : {ProcessModel::vibrating_lattice(8), ProcessModel::vibrating_lattice(4), ProcessModel::poisson(1)}) {
    const auto samples = draw(m, 256.0, 200, 508);
    std::vector<NeighborDensity> nd;
    for (int k = 1; k <= 16; ++k) nd.push_back(kth_neighbor_density(samples, k, 256.0, 32.0, 640));
    const auto g = crystallization_gap(nd, 0.5, 16);
    gaps.push_back(g.value);
    sigmas.push_back(g.std_error);
  }
  o.detail << "gap functional " << fmt(gaps[0]) << " < " << fmt(gaps[1], 4) << " < " << fmt(gaps[2], 4) << " < "
           << fmt(gaps[3], 4);
  o.require(zero.value == 0.0, "gap functional nonzero on the exact lattice");
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
    o.require(gaps[i + 1] - gaps[i] > 3.0 * std::hypot(sigmas[i], sigmas[i + 1]), "gap functional ordering");
}

void ac6(Outcome& o) {
  const std::vector<int> ks = {2, 4, 8, 16};
  for (const auto& kernel : {Kernel::riesz(1, 0.5), Kernel::log1d()}) {
    const double lattice = kernel.is_log() ? -std::log(2.0 * M_PI) : 2.0 * boost::math::zeta(0.5);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k : ks) {
      const auto r = wint_from_rho2(rho2_analytic(ProcessModel::vibrating_lattice(k)), kernel, kRho2Ladder);
      const double x = std::log(k), y = std::log(std::abs(r.extrapolated - lattice));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(ks.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    o.detail << kernel.name() << " slope " << fmt(slope, 4) << "; ";
    o.require(std::abs(slope + 2.0) <= 0.4, kernel.name() + " slope outside -2 +- 0.4");
  }
}

void ac7(Outcome& o) {
  const std::vector<double> grid = {0.5, 0.75, 1, 1.25, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  const auto kernel = Kernel::riesz(1, 0.5);
  double previous = 0.0;
  bool monotone = true;
  for (double beta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const auto scan = free_energy_scan(beta, kernel, grid);
    o.detail << "beta " << beta << ": " << fmt(scan.argmin_theta, 5) << "; ";
    if (beta == 0.01)
      o.require(scan.bracket_lo <= 1.0 && 1.0 <= scan.bracket_hi, "argmin bracket at beta 0.01 misses 1");
    if (beta == 100.0)
      o.require(scan.grid_argmin == grid.back() && scan.argmin_theta >= grid[grid.size() - 2],
                "argmin at beta 100 not at the grid's upper end");
    monotone = monotone && scan.argmin_theta >= previous;
    previous = scan.argmin_theta;
  }
  o.require(monotone, "argmin not non-decreasing in beta");
}

void ac8(Outcome& o) {
  const auto poisson = ProcessModel::poisson(1);
  for (double theta : {0.5, 2.0, 4.0}) {
    const auto model = ProcessModel::renewal(GapLaw::gamma(theta));
    const double ers = renewal_entropy_rate(model.gap);
    for (double R : {2.0, 4.0, 8.0}) {
      const auto p = draw(model, R, 20000, 808);
      const auto q = draw(poisson, R, 20000, 809);
      const auto tv = tv_lower_bound(p, q, R, 2);
      const auto check = pinsker_check(ers, tv.tv, R, 1, tv.noise_floor);
      o.require(check.satisfied, "theta " + fmt(theta) + " R " + fmt(R));
      if (R == 8.0)
        o.detail << "theta " << theta << " R 8: tv " << fmt(tv.tv, 3) << " <= " << fmt(check.pinsker_upper, 3)
                 << "; ";
    }
  }
}

void ac9(Outcome& o) {
  const double e = renewal_entropy_rate(GapLaw::exponential());
  o.detail << "exponential " << fmt(e, 3) << "; ";
  o.require(std::abs(e) <= 1e-8, "exponential entropy rate not zero");
  // Frozen quadrature oracle: 1 + integral of f log f for the triangular gap law.
  const std::vector<std::pair<int, double>> table = {
      {2, 0.5}, {3, 0.905465108108}, {4, 1.193147180560}, {8, 1.886294361120}, {16, 2.579441541680}, {32, 3.272588722240}};
  double prev = -1e300;
  for (const auto& [k, oracle] : table) {
    const double v = renewal_entropy_rate(GapLaw::uniform_hat(k));
    o.require(std::abs(v - oracle) <= 1e-9, "uniform_hat(" + std::to_string(k) + ") off the oracle table");
    o.require(v > prev, "uniform_hat values not increasing");
    prev = v;
  }
  const double growth = (renewal_entropy_rate(GapLaw::uniform_hat(32)) - renewal_entropy_rate(GapLaw::uniform_hat(2))) /
                        std::log(16.0);
  o.detail << "growth per log k " << fmt(growth, 6);
  o.require(std::abs(growth - 1.0) <= 1e-6, "log-growth slope");
}

void ac10(Outcome& o) {
  const double target = -1.0 - std::log(2.0);
  const auto kernel = Kernel::log1d();
  const auto near = Discretization::make(16.0, 1.0 / 16.0, 64.0);
  const auto hard64 = evaluate_candidate(hardcore_values(near), near, kernel, true);
  o.detail << "hardcore R=64 dev " << fmt(hard64.objective - target, 3) << "; ";

  const auto disc = Discretization::make(16.0, 1.0 / 16.0, 512.0);
  const auto hard = evaluate_candidate(hardcore_values(disc), disc, kernel, true);
  o.detail << "hardcore R=512 " << fmt(hard.objective, 7) << " dev " << fmt(hard.objective - target, 3) << "; ";
  o.require(hard.feasible_direct && hard.feasible_fourier, "hardcore infeasible");
  o.require(std::abs(hard.objective - target) <= 1e-3, "hardcore objective off -1 - log 2");

  for (const auto& k : {Kernel::log1d(), Kernel::riesz(1, 0.5)}) {
    const auto ref = evaluate_candidate(hardcore_values(disc), disc, k, k.is_log());
    const auto best = minimize_t2(disc, k, SolverOptions{});
    o.detail << k.name() << " solver " << fmt(best.objective, 7) << " (hardcore " << fmt(ref.objective, 7)
             << ", violation " << fmt(best.max_violation, 2) << "); ";
    o.require(best.objective <= ref.objective + 1e-3, k.name() + " solver worse than hardcore");
    o.require(best.max_violation <= 1e-6, k.name() + " solver infeasible");
  }
}

void ac11(Outcome& o) {
  using nlohmann::ordered_json;
  const auto base = fs::temp_directory_path() / "rieszlab_acceptance_ac11";
  fs::remove_all(base);
  const std::vector<std::pair<cli::Command, std::string>> runs = {
      {cli::Command::Generate, R"({"model":{"kind":"renewal","gap":{"kind":"gamma","theta":2}},"R":32,"n_replicas":3})"},
      {cli::Command::Rho2, R"({"model":{"kind":"vibrating_lattice","k":4},"n_replicas":40})"},
      {cli::Command::Variance, R"({"model":{"kind":"bernoulli_block","k":2},"n_replicas":100})"},
      {cli::Command::Energy, R"({"model":{"kind":"poisson"},"kernel":{"family":"log1d"},"n_replicas":100})"},
      {cli::Command::Energy, R"({"model":{"kind":"bernoulli_block","k":2},"kernel":{"family":"riesz","s":0.5},"route":"rho2"})"},
      {cli::Command::Neighbors, R"({"model":{"kind":"poisson"},"n_replicas":40})"},
      {cli::Command::Crystal, R"({"model":{"kind":"vibrating_lattice","k":8},"n_replicas":40})"},
      {cli::Command::Freemin, R"({"beta":1,"theta_grid":[0.75,1,2,4]})"},
      {cli::Command::Lp, R"({"v_max":8,"h":0.125,"R":64,"iterations":30})"},
      {cli::Command::Pinsker, R"({"model":{"kind":"renewal","gap":{"kind":"gamma","theta":4}},"n_replicas":500})"}};
  std::size_t identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> manifests;
    for (int threads : {1, 4, 1}) {
      cli::Overrides ov;
      ov.threads = threads;
      ov.out = (base / (std::to_string(i) + "_" + std::to_string(manifests.size()))).string();
      const auto spec = cli::parse_spec(runs[i].first, ordered_json::parse(runs[i].second), ov);
      cli::run(spec);
      std::ifstream in(fs::path(*ov.out) / "manifest.json", std::ios::binary);
      std::ostringstream text;
      text << in.rdbuf();
      manifests.push_back(text.str());
    }
    const bool same = manifests[0] == manifests[1] && manifests[1] == manifests[2];
    identical += same;
    o.require(same, cli::to_string(runs[i].first) + " outputs differ between runs");
  }
  set_thread_limit(0);
  o.detail << identical << "/" << runs.size() << " experiments byte-identical across runs and thread caps 1/4";
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1 Poisson zero energy", ac1},
      {"AC2 route agreement", ac2},
      {"AC3 discrepancy identity", ac3},
      {"AC4 hyperuniformity classification", ac4},
      {"AC5 crystallization ordering", ac5},
      {"AC6 vibrating-lattice rate", ac6},
      {"AC7 free-energy limits", ac7},
      {"AC8 Pinsker suite", ac8},
      {"AC9 entropy rate anchors", ac9},
      {"AC10 LP explorer", ac10},
      {"AC11 determinism", ac11},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %s (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
