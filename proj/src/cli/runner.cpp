#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "rieszlab/cli.hpp"
#include "rieszlab/energy.hpp"
#include "rieszlab/estimators.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/lpx.hpp"
#include "rieszlab/onedim.hpp"
#include "rieszlab/parallel.hpp"

namespace rieszlab::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Command, std::string>> kCommands = {
    {Command::Generate, "generate"}, {Command::Rho2, "rho2"},         {Command::Variance, "variance"},
    {Command::Energy, "energy"},     {Command::Neighbors, "neighbors"}, {Command::Crystal, "crystal"},
    {Command::Freemin, "freemin"},   {Command::Lp, "lp"},             {Command::Pinsker, "pinsker"}};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

// Typed access to one JSON object; problems accumulate instead of throwing.
class Reader {
 public:
  Reader(const ordered_json& obj, std::string prefix, std::vector<std::string>& issues)
      : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {}

  bool has(const std::string& key) const { return obj_.contains(key); }
  const ordered_json& at(const std::string& key) const { return obj_.at(key); }

  void issue(const std::string& key, const std::string& why) { issues_.push_back(prefix_ + key + ": " + why); }

  void reject_unknown(const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj_.items())
      if (!allowed.count(key)) issue(key, "unknown key");
  }

  double number(const std::string& key, double def, bool positive = false) {
    if (!has(key)) return def;
    const auto& v = at(key);
    if (!v.is_number()) return bad(key, "expected a number", def);
    const double x = v.get<double>();
    if (!std::isfinite(x)) return bad(key, "must be finite", def);
    if (positive && !(x > 0.0)) return bad(key, "must be positive", def);
    return x;
  }

  long long integer(const std::string& key, long long def, long long lo, long long hi) {
    if (!has(key)) return def;
    const auto& v = at(key);
    if (!v.is_number_integer()) return bad(key, "expected an integer", def);
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      return bad(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", def);
    return x;
  }

  std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& choices) {
    if (!has(key)) return def;
    const auto& v = at(key);
    if (!v.is_string()) return bad(key, "expected a string", def);
    const auto s = v.get<std::string>();
    if (!choices.empty() && std::find(choices.begin(), choices.end(), s) == choices.end())
      return bad(key, "expected one of " + join(choices, ", "), def);
    return s;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def, bool increasing) {
    if (!has(key)) return def;
    const auto& v = at(key);
    if (!v.is_array() || v.empty()) return bad(key, "expected a non-empty array of numbers", def);
    std::vector<double> xs;
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > 0.0) || !std::isfinite(e.get<double>()))
        return bad(key, "entries must be positive finite numbers", def);
      xs.push_back(e.get<double>());
    }
    if (increasing && !std::is_sorted(xs.begin(), xs.end(), std::less_equal<>()) && xs.size() > 1)
      return bad(key, "must be strictly increasing", def);
    for (std::size_t i = 1; increasing && i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) return bad(key, "must be strictly increasing", def);
    return xs;
  }

 private:
  template <typename T>
  T bad(const std::string& key, const std::string& why, T def) {
    issue(key, why);
    return def;
  }

  const ordered_json& obj_;
  std::string prefix_;
  std::vector<std::string>& issues_;
};

std::optional<GapLaw> parse_gap(const ordered_json& j, std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back("model.gap: expected an object");
    return std::nullopt;
  }
  Reader r(j, "model.gap.", issues);
  const auto kind = r.text("kind", "", {"exponential", "gamma", "uniform_hat"});
  if (kind == "exponential") {
    r.reject_unknown({"kind"});
    return GapLaw::exponential();
  }
  if (kind == "gamma") {
    r.reject_unknown({"kind", "theta"});
    if (!r.has("theta")) r.issue("theta", "required for gamma gaps");
    return GapLaw::gamma(r.number("theta", 1.0, true));
  }
  if (kind == "uniform_hat") {
    r.reject_unknown({"kind", "k"});
    if (!r.has("k")) r.issue("k", "required for uniform_hat gaps");
    return GapLaw::uniform_hat(static_cast<int>(r.integer("k", 2, 2, 1 << 20)));
  }
  if (!r.has("kind")) r.issue("kind", "required");
  return std::nullopt;
}

std::optional<ProcessModel> parse_model(const ordered_json& j, std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back("model: expected an object");
    return std::nullopt;
  }
  Reader r(j, "model.", issues);
  const auto kind = r.text("kind", "", {"poisson", "lattice", "bernoulli_block", "vibrating_lattice", "renewal"});
  if (!r.has("kind")) r.issue("kind", "required");
  const auto before = issues.size();
  std::optional<ProcessModel> model;
  if (kind == "poisson" || kind == "lattice") {
    r.reject_unknown({"kind", "d"});
    const int d = static_cast<int>(r.integer("d", 1, 1, 3));
    model = kind == "poisson" ? ProcessModel::poisson(d) : ProcessModel::lattice(d);
  } else if (kind == "bernoulli_block") {
    r.reject_unknown({"kind", "d", "k"});
    if (!r.has("k")) r.issue("k", "required");
    const int d = static_cast<int>(r.integer("d", 1, 1, 3));
    model = ProcessModel::bernoulli_block(d, static_cast<int>(r.integer("k", 1, 1, 1 << 16)));
  } else if (kind == "vibrating_lattice") {
    r.reject_unknown({"kind", "d", "k"});
    if (!r.has("k")) r.issue("k", "required");
    r.integer("d", 1, 1, 1);
    model = ProcessModel::vibrating_lattice(static_cast<int>(r.integer("k", 1, 1, 1 << 20)));
  } else if (kind == "renewal") {
    r.reject_unknown({"kind", "d", "gap"});
    r.integer("d", 1, 1, 1);
    if (!r.has("gap")) {
      r.issue("gap", "required for renewal models");
    } else if (auto gap = parse_gap(r.at("gap"), issues)) {
      model = ProcessModel::renewal(*gap);
    }
  }
  if (issues.size() != before) return std::nullopt;
  return model;
}

std::optional<Kernel> parse_kernel(const ordered_json& j, std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back("kernel: expected an object");
    return std::nullopt;
  }
  Reader r(j, "kernel.", issues);
  const auto family = r.text("family", "", {"log1d", "log2d", "riesz"});
  if (!r.has("family")) r.issue("family", "required");
  const auto before = issues.size();
  std::optional<Kernel> kernel;
  if (family == "log1d" || family == "log2d") {
    r.reject_unknown({"family", "d", "s"});
    const int d = family == "log1d" ? 1 : 2;
    r.integer("d", d, d, d);
    kernel = family == "log1d" ? Kernel::log1d() : Kernel::log2d();
  } else if (family == "riesz") {
    r.reject_unknown({"family", "d", "s"});
    if (!r.has("s")) r.issue("s", "required for riesz kernels");
    const int d = static_cast<int>(r.integer("d", 1, 1, 3));
    const double s = r.number("s", 0.5, true);
    if (issues.size() == before) {
      try {
        kernel = Kernel::riesz(d, s);
      } catch (const Error& e) {
        r.issue("s", e.what());
      }
    }
  }
  if (issues.size() != before) return std::nullopt;
  return kernel;
}

ordered_json model_json(const ProcessModel& m) {
  static const char* kinds[] = {"poisson", "lattice", "bernoulli_block", "vibrating_lattice", "renewal"};
  ordered_json j{{"kind", kinds[static_cast<int>(m.kind)]}, {"d", m.d}};
  if (m.kind == ProcessModel::Kind::BernoulliBlock || m.kind == ProcessModel::Kind::VibratingLattice) j["k"] = m.k;
  if (m.kind == ProcessModel::Kind::Renewal) {
    ordered_json g;
    switch (m.gap.kind) {
      case GapLaw::Kind::Exponential: g = {{"kind", "exponential"}}; break;
      case GapLaw::Kind::Gamma: g = {{"kind", "gamma"}, {"theta", m.gap.shape}}; break;
      case GapLaw::Kind::UniformHat: g = {{"kind", "uniform_hat"}, {"k", m.gap.k}}; break;
    }
    j["gap"] = g;
  }
  return j;
}

ordered_json override_value(const std::string& raw) {
  try {
    auto v = ordered_json::parse(raw);
    if (!v.is_structured()) return v;
  } catch (const nlohmann::json::parse_error&) {
  }
  return raw;
}

const std::vector<double> kDefaultThetaGrid = {0.5, 0.75, 1, 1.25, 1.5, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error("invalid configuration: " + join(issues, "; ")), issues_(std::move(issues)) {}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [c, n] : kCommands)
    if (n == name) return c;
  return std::nullopt;
}

std::string to_string(Command command) {
  for (const auto& [c, n] : kCommands)
    if (c == command) return n;
  return "?";
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& entry : kCommands) names.push_back(entry.second);
  return names;
}

ExperimentSpec parse_spec(Command command, ordered_json config, const Overrides& overrides) {
  std::vector<std::string> issues;
  if (!config.is_object()) throw ValidationError({"<root>: configuration must be a JSON object"});

  for (const auto& assignment : overrides.set) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      issues.push_back(assignment + ": expected key=value");
      continue;
    }
    const auto key = assignment.substr(0, eq);
    if (config.contains(key) && config[key].is_structured()) {
      issues.push_back(key + ": only top-level scalar keys can be overridden");
      continue;
    }
    config[key] = override_value(assignment.substr(eq + 1));
  }
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.threads) config["threads"] = *overrides.threads;
  if (overrides.out) config["out"] = *overrides.out;

  ExperimentSpec spec;
  spec.command = command;
  Reader r(config, "", issues);

  std::set<std::string> allowed = {"seed", "threads", "out"};
  bool wants_model = false, wants_kernel = false;
  switch (command) {
    case Command::Generate: allowed.insert({"model", "R", "n_replicas"}); wants_model = true; break;
    case Command::Rho2: allowed.insert({"model", "R", "n_replicas", "v_max", "n_bins"}); wants_model = true; break;
    case Command::Variance: allowed.insert({"model", "R_list", "n_replicas", "c_log"}); wants_model = true; break;
    case Command::Energy:
      allowed.insert({"model", "kernel", "route", "R_list", "n_replicas"});
      wants_model = wants_kernel = true;
      break;
    case Command::Neighbors:
      allowed.insert({"model", "R", "n_replicas", "k_max", "x_max", "n_bins"});
      wants_model = true;
      break;
    case Command::Crystal:
      allowed.insert({"model", "R", "n_replicas", "k_max", "x_max", "n_bins", "s"});
      wants_model = true;
      break;
    case Command::Freemin: allowed.insert({"kernel", "beta", "theta_grid"}); break;
    case Command::Lp:
      allowed.insert({"kernel", "v_max", "h", "R", "oversample", "iterations", "neutrality", "step_schedule",
                      "step_initial"});
      break;
    case Command::Pinsker: allowed.insert({"model", "R_list", "n_replicas", "tile_count"}); wants_model = true; break;
  }
  r.reject_unknown(allowed);

  spec.seed = static_cast<std::uint64_t>(r.integer("seed", 1, 0, std::numeric_limits<long long>::max()));
  spec.threads = static_cast<int>(r.integer("threads", 0, 0, 4096));
  spec.out_dir = r.text("out", "out", {});

  if (wants_model) {
    if (!r.has("model"))
      r.issue("model", "required");
    else
      spec.model = parse_model(r.at("model"), issues);
  }
  if (wants_kernel || command == Command::Freemin || command == Command::Lp) {
    if (r.has("kernel"))
      spec.kernel = parse_kernel(r.at("kernel"), issues);
    else if (wants_kernel)
      r.issue("kernel", "required");
    else
      spec.kernel = command == Command::Lp ? Kernel::log1d() : Kernel::riesz(1, 0.5);
  }
  const bool one_dim_model = spec.model && spec.model->d == 1;
  auto require_1d = [&](const char* why) {
    if (spec.model && !one_dim_model) r.issue("model.d", why);
  };

  ordered_json echo;
  echo["command"] = to_string(command);
  echo["seed"] = spec.seed;
  if (spec.model) echo["model"] = model_json(*spec.model);
  if (spec.kernel) echo["kernel"] = to_json(*spec.kernel);

  switch (command) {
    case Command::Generate:
      spec.R = r.number("R", 64.0, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 1, 1, 100000));
      echo["R"] = spec.R;
      echo["n_replicas"] = spec.n_replicas;
      break;
    case Command::Rho2:
      spec.R = r.number("R", 64.0, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 100, 1, 10000000));
      spec.v_max = r.number("v_max", 4.0, true);
      spec.n_bins = static_cast<int>(r.integer("n_bins", 80, 1, 1000000));
      if (spec.v_max >= spec.R) r.issue("v_max", "must be smaller than R");
      echo["R"] = spec.R;
      echo["n_replicas"] = spec.n_replicas;
      echo["v_max"] = spec.v_max;
      echo["n_bins"] = spec.n_bins;
      break;
    case Command::Variance:
      spec.R_list = r.numbers("R_list", {4, 8, 16, 32, 64}, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 200, 2, 10000000));
      spec.c_log = r.number("c_log", 1.0, true);
      if (spec.R_list.size() < 4 || spec.R_list.back() < 10.0 * spec.R_list.front())
        r.issue("R_list", "needs at least 4 values spanning a decade");
      echo["R_list"] = spec.R_list;
      echo["n_replicas"] = spec.n_replicas;
      echo["c_log"] = spec.c_log;
      break;
    case Command::Energy: {
      spec.route = r.text("route", "monte_carlo", {"monte_carlo", "rho2", "lattice_series"});
      spec.R_list = r.numbers("R_list", {16, 32, 64, 128, 256}, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 200, 30, 100000000));
      if (spec.model && spec.kernel && spec.model->d != spec.kernel->dim())
        r.issue("kernel.d", "does not match model.d");
      if (spec.route == "lattice_series" && spec.model && spec.model->kind != ProcessModel::Kind::Lattice)
        r.issue("route", "lattice_series applies to the lattice model only");
      if (spec.R_list.size() < 2) r.issue("R_list", "needs at least two values");
      echo["route"] = spec.route;
      echo["R_list"] = spec.R_list;
      if (spec.route == "monte_carlo") echo["n_replicas"] = spec.n_replicas;
      break;
    }
    case Command::Neighbors:
    case Command::Crystal:
      require_1d("nearest-neighbor densities are one-dimensional");
      spec.R = r.number("R", 256.0, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 100, 1, 10000000));
      spec.k_max = static_cast<int>(r.integer("k_max", command == Command::Crystal ? 16 : 8, 1, 100000));
      spec.x_max = r.number("x_max", command == Command::Crystal ? 32.0 : 16.0, true);
      spec.n_bins = static_cast<int>(r.integer("n_bins", 640, 1, 10000000));
      if (spec.x_max >= spec.R) r.issue("x_max", "must be smaller than R");
      echo["R"] = spec.R;
      echo["n_replicas"] = spec.n_replicas;
      echo["k_max"] = spec.k_max;
      echo["x_max"] = spec.x_max;
      echo["n_bins"] = spec.n_bins;
      if (command == Command::Crystal) {
        spec.s_exponent = r.number("s", 0.5, false);
        if (spec.s_exponent < 0.0 || spec.s_exponent >= 1.0) r.issue("s", "must lie in [0, 1)");
        echo["s"] = spec.s_exponent;
      }
      break;
    case Command::Freemin:
      if (!r.has("beta")) r.issue("beta", "required");
      spec.beta = r.number("beta", 1.0, true);
      spec.theta_grid = r.numbers("theta_grid", kDefaultThetaGrid, true);
      if (std::find(spec.theta_grid.begin(), spec.theta_grid.end(), 1.0) == spec.theta_grid.end())
        r.issue("theta_grid", "must contain 1");
      if (spec.kernel && spec.kernel->dim() != 1) r.issue("kernel.d", "free-energy scans are one-dimensional");
      echo["beta"] = spec.beta;
      echo["theta_grid"] = spec.theta_grid;
      break;
    case Command::Lp: {
      spec.v_max = r.number("v_max", 16.0, true);
      spec.h = r.number("h", 1.0 / 16.0, true);
      spec.R = r.number("R", 64.0, true);
      spec.oversample = static_cast<std::size_t>(r.integer("oversample", 4, 1, 64));
      spec.iterations = static_cast<std::size_t>(r.integer("iterations", 200, 1, 10000000));
      if (r.has("neutrality")) {
        const auto& v = r.at("neutrality");
        if (v.is_boolean())
          spec.neutrality = v.get<bool>() ? 1 : 0;
        else if (!(v.is_string() && v.get<std::string>() == "auto"))
          r.issue("neutrality", "expected true, false or \"auto\"");
      }
      spec.step_schedule = r.text("step_schedule", "inverse_sqrt", {"inverse_sqrt", "constant"});
      spec.step_initial = r.number("step_initial", 0.0);
      if (spec.step_initial < 0.0) r.issue("step_initial", "must be non-negative");
      if (spec.kernel && spec.kernel->dim() != 1) r.issue("kernel.d", "the LP explorer is one-dimensional");
      const double cells = spec.v_max / spec.h;
      if (std::abs(cells - std::round(cells)) > 1e-9 * cells) r.issue("h", "must divide v_max");
      if (spec.R < spec.v_max) r.issue("R", "must be at least v_max");
      echo["v_max"] = spec.v_max;
      echo["h"] = spec.h;
      echo["R"] = spec.R;
      echo["oversample"] = spec.oversample;
      echo["iterations"] = spec.iterations;
      echo["neutrality"] = spec.neutrality < 0 ? ordered_json("auto") : ordered_json(spec.neutrality == 1);
      echo["step_schedule"] = spec.step_schedule;
      echo["step_initial"] = spec.step_initial;
      break;
    }
    case Command::Pinsker:
      require_1d("the Pinsker suite compares one-dimensional renewal processes");
      if (spec.model && spec.model->kind != ProcessModel::Kind::Renewal)
        r.issue("model.kind", "the Pinsker suite needs a renewal model");
      spec.R_list = r.numbers("R_list", {2, 4, 8}, true);
      spec.n_replicas = static_cast<std::size_t>(r.integer("n_replicas", 20000, 10, 100000000));
      spec.tile_count = static_cast<int>(r.integer("tile_count", 2, 1, 64));
      echo["R_list"] = spec.R_list;
      echo["n_replicas"] = spec.n_replicas;
      echo["tile_count"] = spec.tile_count;
      break;
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  spec.echo = std::move(echo);
  return spec;
}

ordered_json RunManifest::to_json() const {
  ordered_json files = ordered_json::array();
  for (const auto& [name, digest] : outputs) files.push_back({{"file", name}, {"sha256", digest}});
  return {{"spec", spec},
          {"software", {{"name", "rieszlab"}, {"version", version}}},
          {"replicas", {{"total", replicas_total}, {"singular", singular_replicas}}},
          {"outputs", files}};
}

namespace {

class OutputSink {
 public:
  OutputSink(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void csv(const std::string& name, const CsvTable& table) {
    write_csv(dir_ / name, table);
    record(name);
  }
  void json(const std::string& name, const ordered_json& doc) {
    write_json(dir_ / name, doc);
    record(name);
  }
  const fs::path& dir() const { return dir_; }

 private:
  void record(const std::string& name) { manifest_.outputs.emplace_back(name, sha256_file(dir_ / name)); }

  fs::path dir_;
  RunManifest& manifest_;
};

std::vector<PointConfiguration> sample_replicas(const ProcessModel& model, double R, std::size_t n, std::uint64_t seed) {
  const Window window(R, model.d);
  return parallel_map<PointConfiguration>(n, [&](std::size_t i) { return sample(model, window, Seed{seed, i}); });
}

std::vector<NeighborDensity> neighbor_densities(const ExperimentSpec& spec) {
  std::vector<NeighborDensity> out;
  if (spec.model->kind == ProcessModel::Kind::Lattice) {
    for (int k = 1; k <= spec.k_max; ++k) out.push_back(NeighborDensity::lattice(k, spec.x_max, spec.n_bins));
    return out;
  }
  const auto samples = sample_replicas(*spec.model, spec.R, spec.n_replicas, spec.seed);
  for (int k = 1; k <= spec.k_max; ++k)
    out.push_back(kth_neighbor_density(samples, k, spec.R, spec.x_max, spec.n_bins));
  return out;
}

ordered_json neighbor_summary(const std::vector<NeighborDensity>& densities, bool exact) {
  ordered_json orders = ordered_json::array();
  for (const auto& nd : densities)
    orders.push_back({{"k", nd.k},
                      {"total_mass", nd.total_mass},
                      {"total_mass_stderr", nd.total_mass_error},
                      {"mean_position", nd.mean_position}});
  return {{"exact_lattice", exact}, {"orders", orders}};
}

void run_command(const ExperimentSpec& spec, OutputSink& sink, RunManifest& manifest) {
  switch (spec.command) {
    case Command::Generate: {
      const auto samples = sample_replicas(*spec.model, spec.R, spec.n_replicas, spec.seed);
      manifest.replicas_total = samples.size();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        std::ostringstream name;
        name << "config_" << std::setw(4) << std::setfill('0') << i << ".csv";
        sink.csv(name.str(), to_csv(samples[i], spec.model->descriptor(), spec.seed));
      }
      break;
    }
    case Command::Rho2: {
      const auto samples = sample_replicas(*spec.model, spec.R, spec.n_replicas, spec.seed);
      manifest.replicas_total = samples.size();
      BinSpec bins{spec.v_max, spec.n_bins, spec.model->d == 1 ? BinSpec::Mode::Signed1D : BinSpec::Mode::Radial};
      const auto est = estimate_rho2(samples, bins);
      sink.csv("rho2.csv", to_csv(est));
      ordered_json summary{{"mode", spec.model->d == 1 ? "signed" : "radial"}, {"n_replicas", est.n_replicas}};
      if (spec.model->d == 1) {
        try {
          const auto exact = rho2_analytic(*spec.model);
          if (!exact.lattice_atoms) {
            CsvTable t{{"bin_center", "value"}, {}, {}};
            for (double c : est.centers) t.rows.push_back({c, exact(std::abs(c)) - 1.0});
            sink.csv("rho2_analytic.csv", t);
          }
        } catch (const NotApplicableError&) {
        }
      }
      sink.json("rho2.json", summary);
      break;
    }
    case Command::Variance: {
      const auto curve = number_variance_curve(*spec.model, spec.R_list, spec.n_replicas, spec.seed);
      manifest.replicas_total = spec.n_replicas;
      sink.csv("variance.csv", to_csv(curve));
      auto doc = to_json(curve);
      const auto dlog = dlog_from_variance(curve, spec.model->d, spec.c_log);
      doc["dlog"] = {{"values", dlog.values},
                     {"stderr", dlog.std_error},
                     {"last_decade_slope", dlog.last_decade_slope},
                     {"trend", to_string(dlog.trend)},
                     {"c_log", dlog.c_log}};
      sink.json("variance.json", doc);
      break;
    }
    case Command::Energy: {
      EnergyReport report;
      if (spec.route == "monte_carlo") {
        report = wint_monte_carlo(*spec.model, *spec.kernel, spec.R_list, spec.n_replicas, spec.seed);
        manifest.replicas_total = spec.n_replicas;
        manifest.singular_replicas = report.singular_replicas;
      } else if (spec.route == "rho2") {
        report = wint_from_rho2(rho2_analytic(*spec.model), *spec.kernel, spec.R_list);
      } else {
        report = wint_lattice_series(*spec.kernel, spec.R_list);
      }
      sink.csv("energy.csv", to_csv(report));
      sink.json("energy.json", to_json(report));
      break;
    }
    case Command::Neighbors:
    case Command::Crystal: {
      const auto densities = neighbor_densities(spec);
      const bool exact = spec.model->kind == ProcessModel::Kind::Lattice;
      manifest.replicas_total = exact ? 0 : spec.n_replicas;
      sink.csv("neighbors.csv", to_csv(densities));
      if (spec.command == Command::Neighbors) {
        sink.json("neighbors.json", neighbor_summary(densities, exact));
      } else {
        auto doc = to_json(crystallization_gap(densities, spec.s_exponent, spec.k_max));
        doc["exact_lattice"] = exact;
        sink.json("crystal.json", doc);
      }
      break;
    }
    case Command::Freemin: {
      const auto scan = free_energy_scan(spec.beta, *spec.kernel, spec.theta_grid);
      sink.csv("freemin.csv", to_csv(scan));
      sink.json("freemin.json", to_json(scan));
      break;
    }
    case Command::Lp: {
      const auto disc = Discretization::make(spec.v_max, spec.h, spec.R, spec.oversample);
      SolverOptions options;
      options.iterations = spec.iterations;
      options.neutrality = spec.neutrality;
      options.schedule.kind =
          spec.step_schedule == "constant" ? StepSchedule::Kind::Constant : StepSchedule::Kind::InverseSqrt;
      options.schedule.initial = spec.step_initial;
      const auto best = minimize_t2(disc, *spec.kernel, options);
      const bool neutral = spec.neutrality < 0 ? spec.kernel->is_log() : spec.neutrality == 1;
      const auto hard = evaluate_candidate(hardcore_values(disc), disc, *spec.kernel, neutral);
      sink.csv("lp.csv", to_csv(best, disc));
      CsvTable trace{{"iteration", "best_objective", "violation"}, {}, {}};
      for (std::size_t t = 0; t < best.best_objective_trace.size(); ++t)
        trace.rows.push_back({static_cast<double>(t + 1), best.best_objective_trace[t], best.violation_trace[t]});
      sink.csv("lp_trace.csv", trace);
      auto doc = to_json(best);
      doc["hardcore"] = to_json(hard);
      doc["neutrality"] = neutral;
      sink.json("lp.json", doc);
      break;
    }
    case Command::Pinsker: {
      const double ers = renewal_entropy_rate(spec.model->gap);
      const auto poisson = ProcessModel::poisson(1);
      ordered_json entries = ordered_json::array();
      bool all = true;
      for (double R : spec.R_list) {
        const auto p = sample_replicas(*spec.model, R, spec.n_replicas, spec.seed);
        const auto q = sample_replicas(poisson, R, spec.n_replicas, splitmix64(spec.seed ^ 0x9e3779b97f4a7c15ULL));
        const auto tv = tv_lower_bound(p, q, R, spec.tile_count);
        const auto check = pinsker_check(ers, tv.tv, R, 1, tv.noise_floor);
        all = all && check.satisfied;
        auto e = to_json(check);
        e["tv_noise_floor"] = tv.noise_floor;
        e["support_size"] = tv.support_size;
        e["sparse"] = tv.sparse;
        entries.push_back(e);
      }
      manifest.replicas_total = 2 * spec.n_replicas * spec.R_list.size();
      sink.json("pinsker.json", {{"ers", ers}, {"tile_count", spec.tile_count}, {"entries", entries},
                                 {"all_satisfied", all}});
      break;
    }
  }
}

}  // namespace

RunManifest run(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  set_thread_limit(spec.threads);
  RunManifest manifest;
  manifest.spec = spec.echo;
  OutputSink sink(spec.out_dir, manifest);
  run_command(spec, sink, manifest);
  manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(sink.dir() / "manifest.json", manifest.to_json());
  write_json(sink.dir() / "timing.json", {{"wall_time_s", manifest.wall_time}, {"threads", thread_limit()}});
  return manifest;
}

int report_exception(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ValidationError& e) {
    std::cerr << "rieszlab: invalid configuration\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "rieszlab: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError& e) {
    std::cerr << "rieszlab: divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const SingularityError& e) {
    std::cerr << "rieszlab: singularity: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const ConvergenceError& e) {
    std::cerr << "rieszlab: no convergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const Error& e) {
    std::cerr << "rieszlab: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "rieszlab: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "rieszlab: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace rieszlab::cli
