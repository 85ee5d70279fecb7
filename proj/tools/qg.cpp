#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qg/errors.hpp"
#include "qg/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string format;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qg::ConfigError(path, "cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qg::ConfigTree load(const Options& o, std::string& text) {
  text = read_text(o.config);
  qg::ConfigTree tree = qg::parse_config(text);
  if (o.seed) tree["seed"] = *o.seed;
  if (!o.format.empty()) tree["format"] = o.format;
  return tree;
}

fs::path output_dir(const Options& o, const qg::ConfigTree& tree) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("QG_OUTPUT_ROOT");
  const std::string name = tree.contains("name") && tree["name"].is_string()
                               ? tree["name"].get<std::string>()
                               : fs::path(o.config).stem().string();
  return fs::path(root && *root ? root : "qg_output") / name;
}

int run(const Options& o) {
  std::string text;
  const qg::ConfigTree tree = load(o, text);
  if (tree.contains("sweep")) throw qg::ConfigError("sweep", "use the sweep command for parameter grids");
  qg::ExperimentConfig cfg = qg::experiment_from_tree(tree);
  cfg.source_text = text;
  const fs::path dir = output_dir(o, tree);
  const qg::ExperimentResult res = qg::run_experiment(cfg, o.jobs);
  for (const auto& p : qg::write_report(res, cfg, dir)) std::cout << "wrote " << p.string() << "\n";
  for (const auto& v : res.verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " = " << qg::format_double(v.value) << "\n";
  }
  for (const auto& n : res.notes) std::cout << "note: " << n << "\n";
  const auto failures = res.failures();
  for (const auto& f : failures) std::cerr << "failed: " << f << "\n";
  return failures.empty() ? 0 : 1;
}

int sweep(const Options& o) {
  std::string text;
  const qg::ConfigTree tree = load(o, text);
  const fs::path dir = output_dir(o, tree);
  const qg::SweepOutcome out = qg::run_sweep(tree, text, o.jobs, dir);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    const std::string label = out.cells[i].label.empty() ? "(base)" : out.cells[i].label;
    if (!out.errors[i].empty()) {
      std::cerr << "cell " << i << " [" << label << "] error: " << out.errors[i] << "\n";
      continue;
    }
    std::cout << "cell " << i << " [" << label << "] " << (out.results[i].passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& f : out.results[i].failures()) std::cerr << "cell " << i << " failed: " << f << "\n";
  }
  std::cout << "aggregate: " << (dir / "aggregate.csv").string() << "\n";
  return out.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral experiments for 2D dissipative quasi-geostrophic flow"};
  app.require_subcommand(1);
  Options o;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", o.config, "experiment config (key = value or JSON)")->required();
    sub->add_option("--out", o.out, "output directory (default: $QG_OUTPUT_ROOT/<name>)");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json", "both"}));
  };
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run every cell of a parameter grid");
  add_common(run_cmd);
  add_common(sweep_cmd);
  CLI11_PARSE(app, argc, argv);

  try {
    return run_cmd->parsed() ? run(o) : sweep(o);
  } catch (const qg::ConfigError& e) {
    std::cerr << "config error at " << e.path() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!o.out.empty() && fs::exists(o.out)) std::cerr << "partial output may remain in " << o.out << "\n";
    return 3;
  }
}
