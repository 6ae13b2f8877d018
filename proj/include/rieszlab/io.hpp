#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rieszlab/energy.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/estimators.hpp"
#include "rieszlab/lpx.hpp"
#include "rieszlab/onedim.hpp"

namespace rieszlab {

/// Writing or reading a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// 17 significant digits, "%.17g".
std::string format_number(double x);

/// Comma-separated table with a header row and LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  /// Optional leading "# ..." lines.
  std::vector<std::string> comments;

  int column(const std::string& name) const;  // -1 when absent
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Parses a file written by write_csv; every cell must be numeric.
CsvTable read_csv(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const Kernel& kernel);

CsvTable to_csv(const PointConfiguration& config, const std::string& model, std::uint64_t seed);
CsvTable to_csv(const CorrelationEstimate& estimate);
CsvTable to_csv(const VarianceCurve& curve);
CsvTable to_csv(const EnergyReport& report);
CsvTable to_csv(std::span<const NeighborDensity> densities);
CsvTable to_csv(const FreeEnergyScan& scan);
CsvTable to_csv(const CandidateT2& candidate, const Discretization& disc);

nlohmann::ordered_json to_json(const VarianceCurve& curve);
nlohmann::ordered_json to_json(const EnergyReport& report);
nlohmann::ordered_json to_json(const TvReport& report);
nlohmann::ordered_json to_json(const FreeEnergyScan& scan);
nlohmann::ordered_json to_json(const CandidateT2& candidate);
nlohmann::ordered_json to_json(const GapFunctionalValue& gap);

}  // namespace rieszlab
