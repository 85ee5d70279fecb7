#include "qg/report.hpp"

#include <cmath>
#include <cstdio>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qg/errors.hpp"

namespace qg {
namespace {

ConfigTree number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // JSON has no NaN/inf literals
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') {
      out += c;
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

void CsvTable::add_row(const std::vector<double>& values) {
  if (!columns.empty() && values.size() != columns.size()) {
    throw InvalidArgument("csv '" + name + "': row has " + std::to_string(values.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  }
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_double(v));
  rows.push_back(std::move(row));
}

bool ExperimentResult::passed() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

std::vector<std::string> ExperimentResult::failures() const {
  std::vector<std::string> out;
  for (const auto& v : verdicts) {
    if (!v.pass) {
      out.push_back(v.name + ": " + format_double(v.value) + " vs tolerance " +
                    format_double(v.tolerance) + " (" + v.detail + ")");
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

ConfigTree to_json(const Verdict& v) {
  return {{"name", v.name},
          {"pass", v.pass},
          {"value", number(v.value)},
          {"tolerance", number(v.tolerance)},
          {"detail", v.detail}};
}

ConfigTree to_json(const RateFit& f) {
  return {{"model", to_string(f.model)},
          {"exponent", number(f.exponent)},
          {"prefactor", number(f.prefactor)},
          {"rms_residual", number(f.rms_residual)},
          {"std_error", number(f.std_error)},
          {"ci95", {number(f.ci_low), number(f.ci_high)}},
          {"samples", f.samples}};
}

CsvTable decay_table(const DecayReport& report) {
  CsvTable t{"decay",
             {"t", "mass", "linf", "l2", "sobolev", "moment_q", "residual_R", "contamination"},
             {}};
  for (const auto& s : report.samples) {
    t.add_row({s.t, s.mass, s.linf, s.l2, s.sobolev, s.moment_q, s.residual_R, s.contamination});
  }
  return t;
}

ConfigTree to_json(const DecayReport& report) {
  ConfigTree j;
  j["alpha"] = report.alpha;
  j["sigma"] = report.sigma;
  j["q"] = report.q;
  j["initial_mass"] = number(report.initial_mass);
  ConfigTree samples = ConfigTree::array();
  for (const auto& s : report.samples) {
    samples.push_back({{"t", number(s.t)},
                       {"box_length", number(s.box_length)},
                       {"mass", number(s.mass)},
                       {"linf", number(s.linf)},
                       {"l2", number(s.l2)},
                       {"sobolev", number(s.sobolev)},
                       {"moment_q", number(s.moment_q)},
                       {"residual_R", number(s.residual_R)},
                       {"contamination", number(s.contamination)}});
  }
  j["samples"] = std::move(samples);
  ConfigTree fits = ConfigTree::array();
  for (const auto& f : report.fits) {
    ConfigTree e = to_json(f.fit);
    e["name"] = f.name;
    e["predicted"] = number(f.expected);
    fits.push_back(std::move(e));
  }
  j["fits"] = std::move(fits);
  return j;
}

CsvTable ensemble_table(const EnsembleSeries& series) {
  CsvTable t{file_stem(series.name), {"member", "value"}, {}};
  const bool fine = !series.fine_values.empty();
  if (fine) t.columns.push_back("fine_value");
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(series.values[i])};
    if (fine) row.push_back(format_double(series.fine_values[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ConfigTree to_json(const InequalitySuiteReport& report) {
  ConfigTree j;
  ConfigTree series = ConfigTree::array();
  for (const auto& s : report.series) {
    ConfigTree e{{"name", s.name},
                 {"members", s.values.size()},
                 {"max", number(s.max)},
                 {"min", number(s.min)},
                 {"mean", number(s.mean)}};
    if (!s.fine_values.empty()) {
      e["refinement"] = {{"n_coarse", report.config.n_coarse},
                         {"n_fine", report.config.n_fine},
                         {"max_coarse", number(s.max)},
                         {"max_fine", number(s.fine_max)},
                         {"relative_change", number(s.refinement_change)}};
    } else {
      e["aliasing_warnings"] = s.aliasing_warnings;
    }
    series.push_back(std::move(e));
  }
  j["series"] = std::move(series);
  const auto& c = report.commutator;
  j["weight_commutator"] = {{"lhs", number(c.lhs)},
                            {"rhs", number(c.rhs)},
                            {"relative_error", number(c.relative_error)},
                            {"observed_order", number(report.commutator_order)},
                            {"printed_form_rhs", number(c.printed_rhs)},
                            {"printed_form_discrepancy", number(c.printed_discrepancy)}};
  return j;
}

ConfigTree result_json(const ExperimentResult& result, const ExperimentConfig& config) {
  ConfigTree j;
  j["kind"] = result.kind;
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["config"] = config.tree;
  j["config_source"] = config.source_text;
  j["summary"] = result.summary;
  ConfigTree measures = ConfigTree::array();
  for (const auto& m : result.measures) {
    measures.push_back({{"name", m.name},
                        {"measured", number(m.measured)},
                        {"predicted", number(m.predicted)}});
  }
  j["measures"] = std::move(measures);
  ConfigTree verdicts = ConfigTree::array();
  for (const auto& v : result.verdicts) verdicts.push_back(to_json(v));
  j["verdicts"] = std::move(verdicts);
  j["notes"] = result.notes;
  j["pass"] = result.passed();
  return j;
}

std::vector<std::filesystem::path> write_report(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  if (config.format != ReportFormat::csv) {
    const auto path = dir / "report.json";
    write_file(path, result_json(result, config).dump(2) + "\n");
    written.push_back(path);
  }
  if (config.format != ReportFormat::json) {
    for (const auto& table : result.tables) {
      std::ostringstream ss;
      write_csv(ss, table);
      const auto path = dir / (table.name + ".csv");
      write_file(path, ss.str());
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace qg
