#include "rieszlab/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace rieszlab {

using nlohmann::ordered_json;

std::string format_number(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) parts.push_back(cell);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  auto out = open_out(path);
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw ArgumentError("write_csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#", 0) == 0) {
      table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    auto cells = split(line, ',');
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size())
        throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" + c + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ArgumentError(path.string() + ": empty CSV");
  return table;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

ordered_json to_json(const Kernel& kernel) {
  const char* family = kernel.family() == KernelFamily::Log1D   ? "log1d"
                       : kernel.family() == KernelFamily::Log2D ? "log2d"
                                                                : "riesz";
  return ordered_json{{"family", family}, {"d", kernel.dim()}, {"s", kernel.exponent()}};
}

CsvTable to_csv(const PointConfiguration& config, const std::string& model, std::uint64_t seed) {
  CsvTable t;
  const int d = config.dim();
  t.comments.push_back("d=" + std::to_string(d) + " R=" + format_number(config.window().R) + " model=" + model +
                       " seed=" + std::to_string(seed));
  for (int i = 1; i <= d; ++i) t.header.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < config.size(); ++i) {
    auto p = config.point(i);
    t.rows.emplace_back(p.begin(), p.end());
  }
  return t;
}

CsvTable to_csv(const CorrelationEstimate& e) {
  CsvTable t{{"bin_center", "value", "stderr"}, {}, {}};
  for (std::size_t i = 0; i < e.values.size(); ++i) t.rows.push_back({e.centers[i], e.values[i], e.std_error[i]});
  return t;
}

CsvTable to_csv(const VarianceCurve& curve) {
  CsvTable t{{"R", "var", "stderr"}, {}, {}};
  for (const auto& e : curve.entries) t.rows.push_back({e.R, e.mean_sq, e.std_error});
  return t;
}

CsvTable to_csv(const EnergyReport& report) {
  CsvTable t{{"R", "value", "stderr"}, {}, {}};
  for (const auto& e : report.entries) t.rows.push_back({e.R, e.value, e.std_error});
  return t;
}

CsvTable to_csv(std::span<const NeighborDensity> densities) {
  CsvTable t{{"k", "bin_center", "value", "stderr"}, {}, {}};
  for (const auto& nd : densities)
    for (std::size_t i = 0; i < nd.values.size(); ++i)
      t.rows.push_back({static_cast<double>(nd.k), nd.centers[i], nd.values[i], nd.std_error[i]});
  return t;
}

CsvTable to_csv(const FreeEnergyScan& scan) {
  CsvTable t{{"theta", "wint", "ers", "f"}, {}, {}};
  for (const auto& e : scan.entries)
    if (e.feasible) t.rows.push_back({e.theta, e.wint, e.ers, e.f});
  return t;
}

CsvTable to_csv(const CandidateT2& c, const Discretization& disc) {
  CsvTable t{{"v", "T2"}, {}, {}};
  for (std::size_t j = 0; j < disc.n && j < c.values.size(); ++j) t.rows.push_back({disc.cell_center(j), c.values[j]});
  return t;
}

ordered_json to_json(const VarianceCurve& curve) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : curve.entries) entries.push_back({{"R", e.R}, {"var", e.mean_sq}, {"stderr", e.std_error}});
  return {{"entries", entries},
          {"fitted_exponent", curve.fitted_exponent},
          {"exponent_ci", curve.exponent_ci},
          {"fitted_log_prefactor", curve.fitted_log_prefactor},
          {"fit_valid", curve.fit_valid}};
}

ordered_json to_json(const EnergyReport& r) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries) entries.push_back({{"R", e.R}, {"value", e.value}, {"stderr", e.std_error}});
  return {{"route", to_string(r.route)},
          {"kernel", to_json(r.kernel)},
          {"entries", entries},
          {"extrapolated", r.extrapolated},
          {"extrapolation_error", r.extrapolation_error},
          {"extrapolated_stderr", r.extrapolated_std_error},
          {"richardson_iterates", r.richardson_iterates},
          {"rate_constant", r.rate_constant},
          {"replicas_used", r.replicas_used},
          {"singular_replicas", r.singular_replicas}};
}

ordered_json to_json(const TvReport& r) {
  return {{"tv_lower", r.tv_lower}, {"pinsker_upper", r.pinsker_upper}, {"R", r.window_R}, {"satisfied", r.satisfied}};
}

ordered_json to_json(const FreeEnergyScan& s) {
  ordered_json infeasible = ordered_json::array();
  for (const auto& e : s.entries)
    if (!e.feasible) infeasible.push_back(e.theta);
  return {{"beta", s.beta},
          {"argmin_theta", s.argmin_theta},
          {"argmin_f", s.argmin_f},
          {"grid_argmin", s.grid_argmin},
          {"bracket", {s.bracket_lo, s.bracket_hi}},
          {"refined_width", s.refined_width},
          {"wint_monotone", s.wint_monotone},
          {"ers_unimodal", s.ers_unimodal},
          {"infeasible_theta", infeasible}};
}

ordered_json to_json(const CandidateT2& c) {
  return {{"objective", c.objective},
          {"feasible_direct", c.feasible_direct},
          {"feasible_fourier", c.feasible_fourier},
          {"max_violation", c.max_violation},
          {"R", c.R},
          {"direct_violation", c.direct_violation},
          {"fourier_violation", c.fourier_violation},
          {"neutrality_residual", c.neutrality_residual},
          {"fourier_gap_bound", c.fourier_gap_bound},
          {"iterations", c.iterations},
          {"start", c.start}};
}

ordered_json to_json(const GapFunctionalValue& g) {
  return {{"s", g.s_exponent},
          {"k_max", g.k_max},
          {"value", g.value},
          {"stderr", g.std_error},
          {"truncation_bound", std::isfinite(g.truncation_bound) ? ordered_json(g.truncation_bound)
                                                                 : ordered_json("inf")},
          {"tail_exponent", g.tail_exponent}};
}

}  // namespace rieszlab
