#include <cmath>
#include <fstream>
#include <sstream>

#include "rieszlab/cli.hpp"
#include "rieszlab/io.hpp"

namespace rieszlab::cli {

namespace fs = std::filesystem;

namespace {

struct PlotTemplate {
  PlotKind kind;
  const char* name;
  std::vector<std::string> columns;
};

const std::vector<PlotTemplate> kTemplates = {
    {PlotKind::Variance, "variance", {"R", "var", "stderr"}},
    {PlotKind::Rho2, "rho2", {"bin_center", "value", "stderr"}},
    {PlotKind::Energy, "energy", {"R", "value", "stderr"}},
    {PlotKind::Freemin, "freemin", {"theta", "wint", "ers", "f"}},
};

const PlotTemplate& lookup(PlotKind kind) {
  for (const auto& t : kTemplates)
    if (t.kind == kind) return t;
  throw ArgumentError("unknown plot kind");
}

std::string quoted(const fs::path& p) {
  std::string s = p.string(), out = "'";
  for (char c : s) out += c == '\'' ? std::string("''") : std::string(1, c);
  return out + "'";
}

// Log-log least squares of var against R, used when no summary is given.
std::pair<double, double> loglog_fit(const CsvTable& t) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : t.rows) {
    if (!(row[0] > 0.0 && row[1] > 0.0)) continue;
    const double x = std::log(row[0]), y = std::log(row[1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2 || sxx * n - sx * sx <= 0.0) return {0.0, 0.0};
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

double summary_number(const nlohmann::ordered_json& doc, const char* key, const fs::path& path) {
  if (!doc.contains(key) || !doc[key].is_number())
    throw ValidationError({path.string() + ": missing numeric key '" + key + "'"});
  return doc[key].get<double>();
}

}  // namespace

std::optional<PlotKind> parse_plot_kind(const std::string& name) {
  for (const auto& t : kTemplates)
    if (name == t.name) return t.kind;
  return std::nullopt;
}

fs::path emit_plot_script(PlotKind kind, const fs::path& csv, const std::optional<fs::path>& summary_json,
                          const fs::path& script) {
  const auto& tpl = lookup(kind);
  if (!fs::exists(csv)) throw ValidationError({csv.string() + ": file not found"});
  CsvTable table;
  try {
    table = read_csv(csv);
  } catch (const ArgumentError& e) {
    throw ValidationError({e.what()});
  }
  std::vector<std::string> issues;
  for (const auto& c : tpl.columns)
    if (table.column(c) < 0) issues.push_back(csv.string() + ": missing column '" + c + "'");
  if (table.rows.empty()) issues.push_back(csv.string() + ": no data rows");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  nlohmann::ordered_json summary;
  if (summary_json) {
    if (!fs::exists(*summary_json)) throw ValidationError({summary_json->string() + ": file not found"});
    try {
      summary = read_json(*summary_json);
    } catch (const ArgumentError& e) {
      throw ValidationError({e.what()});
    }
  }

  auto col = [&](const std::string& name) { return std::to_string(table.column(name) + 1); };
  const fs::path image = fs::path(script).replace_extension(".png");
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key autotitle columnhead\n"
     << "set terminal pngcairo size 900,600\n"
     << "set output " << quoted(image.filename()) << "\n"
     << "set grid\n";
  const auto data = quoted(fs::absolute(csv));

  switch (kind) {
    case PlotKind::Variance: {
      auto [slope, intercept] = loglog_fit(table);
      if (summary_json) {
        slope = summary_number(summary, "fitted_exponent", *summary_json);
        intercept = summary_number(summary, "fitted_log_prefactor", *summary_json);
      }
      gp << "set logscale xy\n"
         << "set xlabel 'R'\nset ylabel 'E[D_R^2]'\n"
         << "slope = " << format_number(slope) << "\n"
         << "prefactor = exp(" << format_number(intercept) << ")\n"
         << "fit_line(x) = prefactor * x**slope\n"
         << "set label 1 sprintf('fitted slope = %.3f', slope) at graph 0.05, graph 0.92\n"
         << "plot " << data << " using " << col("R") << ":" << col("var") << ":" << col("stderr")
         << " with yerrorbars title 'number variance', \\\n"
         << "     fit_line(x) with lines dashtype 2 title 'fit'\n";
      break;
    }
    case PlotKind::Rho2:
      gp << "set xlabel 'v'\nset ylabel 'rho_2(v) - 1'\n"
         << "set xzeroaxis\n"
         << "plot " << data << " using " << col("bin_center") << ":" << col("value") << ":" << col("stderr")
         << " with yerrorbars title 'estimate'\n";
      break;
    case PlotKind::Energy: {
      gp << "set logscale x\n"
         << "set xlabel 'R'\nset ylabel 'H^{int}_R / R^d'\n";
      if (summary_json) {
        gp << "extrapolated = " << format_number(summary_number(summary, "extrapolated", *summary_json)) << "\n"
           << "plot " << data << " using " << col("R") << ":" << col("value") << ":" << col("stderr")
           << " with yerrorbars title 'ladder', \\\n"
           << "     extrapolated with lines dashtype 2 title 'extrapolated'\n";
      } else {
        gp << "plot " << data << " using " << col("R") << ":" << col("value") << ":" << col("stderr")
           << " with yerrorbars title 'ladder'\n";
      }
      break;
    }
    case PlotKind::Freemin:
      gp << "set logscale x\n"
         << "set xlabel 'theta'\nset ylabel 'f(theta)'\n";
      if (summary_json) {
        const double argmin = summary_number(summary, "argmin_theta", *summary_json);
        gp << "argmin = " << format_number(argmin) << "\n"
           << "set arrow 1 from argmin, graph 0 to argmin, graph 1 nohead dashtype 2\n"
           << "set label 1 sprintf('argmin = %.4g', argmin) at argmin, graph 0.95 offset 1,0\n";
      }
      gp << "plot " << data << " using " << col("theta") << ":" << col("f") << " with linespoints title 'f', \\\n"
         << "     '' using " << col("theta") << ":" << col("wint") << " with lines title 'W^{int}', \\\n"
         << "     '' using " << col("theta") << ":" << col("ers") << " with lines title 'ERS'\n";
      break;
  }

  std::ofstream out(script, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + script.string() + " for writing");
  out << gp.str();
  out.flush();
  if (!out) throw IoError("write failed: " + script.string());
  return script;
}

}  // namespace rieszlab::cli
