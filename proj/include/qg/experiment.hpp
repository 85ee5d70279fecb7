#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qg/config.hpp"
#include "qg/report.hpp"

namespace qg {

/// Runs one configured experiment. `jobs` bounds internal threading
/// (inequality ensembles, kernel alphas); simulations are single-threaded.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

struct SweepOutcome {
  std::vector<SweepCell> cells;
  std::vector<ExperimentResult> results;  // empty result for a failed cell
  std::vector<std::string> errors;        // per cell, empty on success
  CsvTable aggregate;   // cell,label,measure,measured,predicted,difference
  CsvTable refinement;  // present when an axis ends in ".n"
  bool passed() const;
};

/// Expands the sweep grid, runs the cells on up to `jobs` threads and writes
/// each into `out_dir/cell_NNN`, followed by aggregate.csv / aggregate.json.
/// A failing cell is recorded and does not stop the others.
SweepOutcome run_sweep(const ConfigTree& tree, const std::string& source_text, int jobs,
                       const std::filesystem::path& out_dir);

}  // namespace qg
