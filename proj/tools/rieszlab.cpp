#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rieszlab/cli.hpp"
#include "rieszlab/io.hpp"

namespace cli = rieszlab::cli;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on intrinsic energies of stationary point processes"};
  app.set_version_flag("--version", cli::kVersion);
  app.require_subcommand(1);

  struct Experiment {
    std::string config;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::vector<std::string> set;
  };
  Experiment ex;
  std::vector<std::pair<CLI::App*, cli::Command>> experiments;
  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
    sub->add_option("--config", ex.config, "JSON experiment file")->required();
    sub->add_option("--seed", ex.seed, "master seed (overrides the file)");
    sub->add_option("--threads", ex.threads, "worker thread cap, 0 = runtime default")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", ex.out, "output directory (overrides the file)");
    sub->add_option("--set", ex.set, "override a top-level scalar key, key=value");
    experiments.emplace_back(sub, *cli::parse_command(name));
  }

  std::string kind, csv, summary, script;
  auto* plot = app.add_subcommand("plot", "write a gnuplot script for a result CSV");
  plot->add_option("--kind", kind, "variance, rho2, energy or freemin")->required();
  plot->add_option("--csv", csv, "data file")->required();
  plot->add_option("--json", summary, "summary JSON (fitted slope, extrapolated value, argmin)");
  plot->add_option("--script", script, "script path (default <csv dir>/<kind>.gp)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  try {
    if (plot->parsed()) {
      const auto k = cli::parse_plot_kind(kind);
      if (!k) throw cli::ValidationError({"--kind: expected variance, rho2, energy or freemin"});
      const fs::path target = script.empty() ? fs::path(csv).parent_path() / (kind + ".gp") : fs::path(script);
      std::optional<fs::path> json;
      if (!summary.empty()) json = summary;
      std::cout << cli::emit_plot_script(*k, csv, json, target).string() << '\n';
      return cli::kExitOk;
    }
    for (const auto& [sub, command] : experiments) {
      if (!sub->parsed()) continue;
      if (!fs::exists(ex.config)) throw rieszlab::IoError("configuration file not found: " + ex.config);
      auto config = rieszlab::read_json(ex.config);
      cli::Overrides overrides;
      if (sub->count("--seed")) overrides.seed = ex.seed;
      if (sub->count("--threads")) overrides.threads = ex.threads;
      if (sub->count("--out")) overrides.out = ex.out;
      overrides.set = ex.set;
      const auto spec = cli::parse_spec(command, std::move(config), overrides);
      const auto manifest = cli::run(spec);
      std::cerr << "rieszlab: " << cli::to_string(command) << " finished in " << manifest.wall_time << " s, "
                << manifest.outputs.size() << " output files in " << spec.out_dir.string() << '\n';
      return cli::kExitOk;
    }
  } catch (...) {
    return cli::report_exception(std::current_exception());
  }
  return cli::kExitInternal;
}
