#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qg/inequality.hpp"
#include "qg/solver.hpp"

namespace qg {

using ConfigTree = nlohmann::json;

/// Parses either JSON (text starting with '{') or the flat format:
///
///   # comment
///   kind = simulate
///   sim.alpha = 0.5
///   [initial]            # prefixes the following keys with "initial."
///   family = "double_gaussian"
///   sweep.sim.alpha = [0.5, 1.0]
///
/// Values are JSON literals (numbers, true/false, "strings", [arrays]); any
/// other value is taken as a bare string. Errors carry "line N" as the path.
ConfigTree parse_config(std::string_view text);

/// Throws ConfigError(path, ...) if the file cannot be read or parsed.
ConfigTree load_config_file(const std::filesystem::path& path);

/// Sets a dotted key, creating sections as needed.
void set_dotted(ConfigTree& tree, const std::string& key, ConfigTree value);

enum class ExperimentKind {
  simulate,
  theorem1,
  linear_lemma,
  kernel_verify,
  inequality_suite,
  duhamel_check,
};
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

enum class ReportFormat { csv, json, both };
ReportFormat parse_report_format(const std::string& name);
std::string to_string(ReportFormat format);

struct KernelVerifyParams {
  std::vector<double> alphas{1.0};
  double t = 1.0;
  int n = 256;
  double box_length = 16.0;
  double tolerance = 1e-6;  // pointwise relative error on |x| <= L/4
  std::vector<double> scaling_times{4.0};
  double scaling_tolerance = 1e-5;
  double tail_tolerance = 0.1;
};

struct LinearLemmaParams {
  double t_min = 1.0;
  double t_max = 100.0;
  int samples = 12;
  int n = 256;
  double box_factor = 32.0;
  double slope_tolerance = 0.05;
};

struct Theorem1Params {
  double t_first = 1.0;
  double slope_tolerance = 0.1;
  double excess_tolerance = 0.2;
};

struct DuhamelParams {
  int quadrature_order = 4;
  int halvings = 1;  // extra runs at dt/2, dt/4, ...
  double residual_tolerance = 1e-4;
  double picard_epsilon = 1e-3;
  double picard_time = 0.5;
  int picard_iterations = 4;
  int picard_panels = 64;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  std::string name = "experiment";
  std::uint64_t seed = 0;
  ReportFormat format = ReportFormat::both;
  SimConfig sim;
  KernelVerifyParams kernel;
  LinearLemmaParams linear;
  Theorem1Params theorem1;
  DuhamelParams duhamel;
  InequalitySuiteConfig inequality;
  ConfigTree tree;          // effective tree, without any sweep section
  std::string source_text;  // the config file as read
};

/// Schema validation: unknown keys and type mismatches raise ConfigError with
/// the dotted path of the offending field.
ExperimentConfig experiment_from_tree(const ConfigTree& tree);

struct SweepCell {
  std::string label;  // "sim.alpha=0.5,sim.n=128"
  ConfigTree tree;
};

/// Cartesian product of the arrays under "sweep" (keys in sorted order),
/// each applied to the base tree. No sweep section gives one unlabeled cell.
std::vector<SweepCell> expand_sweep(const ConfigTree& tree);

}  // namespace qg
