#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rieszlab/core.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/generators.hpp"

namespace rieszlab::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Generate, Rho2, Variance, Energy, Neighbors, Crystal, Freemin, Lp, Pinsker };

std::optional<Command> parse_command(const std::string& name);
std::string to_string(Command command);
/// Every command name, in declaration order.
std::vector<std::string> command_names();

/// Configuration rejected before any computation. `issues` holds one
/// "key: reason" entry per offending key.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Command-line values that take precedence over the configuration file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  /// Extra "key=value" assignments of top-level scalar keys; the value is
  /// parsed as JSON when possible and kept as a string otherwise.
  std::vector<std::string> set;
};

struct ExperimentSpec {
  Command command = Command::Energy;
  std::optional<ProcessModel> model;
  std::optional<Kernel> kernel;
  std::vector<double> R_list;
  double R = 0.0;  // single window side (generate, rho2, neighbors, crystal)
  std::size_t n_replicas = 0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::filesystem::path out_dir = "out";

  std::string route;                // energy
  double v_max = 0.0;               // rho2, lp
  int n_bins = 0;                   // rho2, neighbors, crystal
  double x_max = 0.0;               // neighbors, crystal
  int k_max = 0;                    // neighbors, crystal
  double s_exponent = 0.0;          // crystal
  double c_log = 1.0;               // variance
  double beta = 0.0;                // freemin
  std::vector<double> theta_grid;   // freemin
  int tile_count = 0;               // pinsker
  double h = 0.0;                   // lp
  std::size_t oversample = 4;       // lp
  std::size_t iterations = 0;       // lp
  int neutrality = -1;              // lp
  std::string step_schedule;        // lp
  double step_initial = 0.0;        // lp

  /// Fully resolved configuration, defaults included (threads and out excluded).
  nlohmann::ordered_json echo;
};

/// Validates `config` for `command`, applying overrides first. Throws
/// ValidationError listing every offending key.
ExperimentSpec parse_spec(Command command, nlohmann::ordered_json config, const Overrides& overrides = {});

struct RunManifest {
  nlohmann::ordered_json spec;
  std::string version = kVersion;
  double wall_time = 0.0;
  std::size_t replicas_total = 0;
  std::size_t singular_replicas = 0;
  std::vector<std::pair<std::string, std::string>> outputs;  // (file name, sha256)

  /// Deterministic part written to manifest.json; wall time goes to timing.json.
  nlohmann::ordered_json to_json() const;
};

/// Runs the experiment, writes its outputs and manifest.json into out_dir.
RunManifest run(const ExperimentSpec& spec);

enum class PlotKind { Variance, Rho2, Energy, Freemin };
std::optional<PlotKind> parse_plot_kind(const std::string& name);

/// Writes a gnuplot script for a CSV produced by `run` and returns its path.
/// `summary_json` optionally supplies the fitted slope, extrapolated value or
/// argmin. Missing or ill-typed columns raise ValidationError.
std::filesystem::path emit_plot_script(PlotKind kind, const std::filesystem::path& csv,
                                       const std::optional<std::filesystem::path>& summary_json,
                                       const std::filesystem::path& script);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitIo = 4;

/// Maps the in-flight exception to an exit code and prints its message to stderr.
int report_exception(std::exception_ptr error);

}  // namespace rieszlab::cli
