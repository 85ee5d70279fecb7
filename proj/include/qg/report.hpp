#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "qg/config.hpp"
#include "qg/diagnostics.hpp"
#include "qg/inequality.hpp"

namespace qg {

/// A CSV file: header row plus preformatted cells.
struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
};

/// Measured quantity next to its predicted value (NaN when none applies).
struct Measure {
  std::string name;
  double measured = 0.0;
  double predicted = 0.0;
};

struct ExperimentResult {
  std::string kind;
  ConfigTree summary = ConfigTree::object();  // kind-specific details
  std::vector<CsvTable> tables;
  std::vector<Measure> measures;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;

  bool passed() const;
  /// "name: value vs tolerance (detail)" for every failed verdict.
  std::vector<std::string> failures() const;
};

/// Round-trip decimal ("%.17g"); "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& out, const CsvTable& table);

ConfigTree to_json(const Verdict& v);
ConfigTree to_json(const RateFit& f);

/// Frozen columns: t,mass,linf,l2,sobolev,moment_q,residual_R,contamination.
CsvTable decay_table(const DecayReport& report);
ConfigTree to_json(const DecayReport& report);

/// "member,value" for gap series, "member,value,fine_value" for ratio series.
CsvTable ensemble_table(const EnsembleSeries& series);
ConfigTree to_json(const InequalitySuiteReport& report);

/// Full JSON report: config echo, summary, measures, verdicts, notes.
ConfigTree result_json(const ExperimentResult& result, const ExperimentConfig& config);

/// Writes report.json and/or one CSV per table into `dir` (created if
/// needed); returns the files written, in order.
std::vector<std::filesystem::path> write_report(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& dir);

}  // namespace qg
