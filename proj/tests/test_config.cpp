#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qg/config.hpp"
#include "qg/errors.hpp"
#include "qg/experiment.hpp"
#include "qg/kernel.hpp"
#include "qg/report.hpp"

using namespace qg;
namespace fs = std::filesystem;

namespace {

std::string config_error_path(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qg_unit_" + name);
  fs::remove_all(d);
  return d;
}

const char* kSmallKernel = R"(
kind = kernel-verify
name = small
[kernel]
alphas = [2.0]
n = 64
scaling_times = [4.0]
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("flat format") {
    const ConfigTree t = parse_config(R"(
# leading comment
kind = simulate
seed = 7
sim.alpha = 0.5   # trailing comment
[initial]
family = "double_gaussian"
offset = 2
[inequality]
sv_q = [3, 4]
kp_p1 = inf
)");
    CHECK(t["kind"] == "simulate");
    CHECK(t["seed"] == 7);
    CHECK(t["sim"]["alpha"] == 0.5);
    CHECK(t["initial"]["family"] == "double_gaussian");
    CHECK(t["initial"]["offset"] == 2);
    CHECK(t["inequality"]["sv_q"].size() == 2);
    CHECK(t["inequality"]["kp_p1"] == "inf");
  }

  TEST_CASE("json and flat forms agree") {
    const ConfigTree a = parse_config("kind = theorem1\nsim.n = 128\nsim.nonlinear = false\n");
    const ConfigTree b = parse_config(R"({"kind": "theorem1", "sim": {"n": 128, "nonlinear": false}})");
    CHECK(a == b);
  }

  TEST_CASE("parse errors carry a location") {
    CHECK(config_error_path([] { parse_config("kind = simulate\nnot a pair\n"); }) == "line 2");
    CHECK(config_error_path([] { parse_config("[sim\n"); }) == "line 1");
    CHECK(config_error_path([] { parse_config("sim.n = 1\nsim.n = 2\n"); }) == "sim.n");
    CHECK(config_error_path([] { parse_config("{not json"); }) == "<json>");
    CHECK(config_error_path([] { load_config_file("/nonexistent/qg.cfg"); }) == "/nonexistent/qg.cfg");
  }

  TEST_CASE("schema errors name the field") {
    const auto path_of = [](const std::string& text) {
      return config_error_path([&] { experiment_from_tree(parse_config(text)); });
    };
    CHECK(path_of("sim.alpha = 1\n") == "kind");
    CHECK(path_of("kind = bogus\n") == "kind");
    CHECK(path_of("kind = simulate\nsim.alpah = 1\n") == "sim.alpah");
    CHECK(path_of("kind = simulate\nsim.n = \"big\"\n") == "sim.n");
    CHECK(path_of("kind = simulate\nsim.nonlinear = 3\n") == "sim.nonlinear");
    CHECK(path_of("kind = simulate\nformat = xml\n") == "format");
    CHECK(path_of("kind = kernel-verify\nkernel.alphas = [3.0]\n") == "kernel.alphas");
    CHECK(path_of("kind = simulate\nsim.n = 48\n") == "sim.n");
    CHECK(path_of("kind = inequality-suite\ninequality.members = 0\n") == "inequality.members");
  }

  TEST_CASE("typed config and defaults") {
    const ExperimentConfig c = experiment_from_tree(parse_config(R"(
kind = simulate
name = demo
seed = 3
format = json
sim.alpha = 0.5
sim.n = 128
inequality.kp_p1 = infinity
)"));
    CHECK(c.kind == ExperimentKind::simulate);
    CHECK(c.name == "demo");
    CHECK(c.seed == 3);
    CHECK(c.format == ReportFormat::json);
    CHECK(c.sim.alpha == 0.5);
    CHECK(c.sim.grid.n() == 128);
    CHECK(c.sim.initial.amplitude == doctest::Approx(1e-2 * kernel_peak(0.5, 1.0)));
    CHECK(c.sim.initial.seed == 3);
    CHECK(std::isinf(c.inequality.kp_exponents.p1));
    for (auto k : {ExperimentKind::simulate, ExperimentKind::theorem1, ExperimentKind::linear_lemma,
                   ExperimentKind::kernel_verify, ExperimentKind::inequality_suite,
                   ExperimentKind::duhamel_check}) {
      CHECK(parse_experiment_kind(to_string(k)) == k);
    }
  }

  TEST_CASE("set_dotted") {
    ConfigTree t = ConfigTree::object();
    set_dotted(t, "a.b.c", 1);
    CHECK(t["a"]["b"]["c"] == 1);
    CHECK_THROWS_AS(set_dotted(t, "a.b.c.d", 2), ConfigError);
    CHECK_THROWS_AS(set_dotted(t, "a..b", 2), ConfigError);
  }

  TEST_CASE("sweep expansion") {
    const ConfigTree t = parse_config(R"(
kind = simulate
sweep.sim.n = [64, 128]
sweep.sim.alpha = [0.5, 1.0, 1.5]
sim.t_end = 10
)");
    const auto cells = expand_sweep(t);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0].label == "sim.alpha=0.5,sim.n=64");
    CHECK(cells[1].label == "sim.alpha=0.5,sim.n=128");
    CHECK(cells[5].label == "sim.alpha=1.5,sim.n=128");
    CHECK(cells[5].tree["sim"]["alpha"] == 1.5);
    CHECK(cells[5].tree["sim"]["t_end"] == 10);
    CHECK(!cells[0].tree.contains("sweep"));
    const auto single = expand_sweep(parse_config("kind = simulate\n"));
    REQUIRE(single.size() == 1);
    CHECK(single[0].label.empty());
    CHECK(config_error_path([] { expand_sweep(parse_config("kind = simulate\nsweep.sim.n = 64\n")); }) ==
          "sweep.sim.n");
  }
}

TEST_SUITE("report") {
  TEST_CASE("number formatting round-trips") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(kInfinity) == "inf");
    CHECK(format_double(-kInfinity) == "-inf");
    for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }

  TEST_CASE("csv layout") {
    CsvTable t{"demo", {"t", "value"}, {}};
    t.add_row({1.0, 0.5});
    t.add_row({2.0, std::nan("")});
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() == "t,value\n1,0.5\n2,nan\n");
    CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
  }

  TEST_CASE("failures list only failed verdicts") {
    ExperimentResult r;
    r.verdicts.push_back({"good", true, 1.0, 2.0, ""});
    r.verdicts.push_back({"bad", false, 3.0, 2.0, "too big"});
    CHECK(!r.passed());
    REQUIRE(r.failures().size() == 1);
    CHECK(r.failures()[0].rfind("bad", 0) == 0);
  }
}

TEST_SUITE("experiment") {
  TEST_CASE("reports are byte-identical across runs") {
    const ConfigTree tree = parse_config(kSmallKernel);
    ExperimentConfig cfg = experiment_from_tree(tree);
    cfg.source_text = kSmallKernel;
    const auto r1 = run_experiment(cfg);
    const auto r2 = run_experiment(cfg);
    CHECK(r1.passed());
    const fs::path d1 = fresh_dir("a"), d2 = fresh_dir("b");
    const auto f1 = write_report(r1, cfg, d1);
    const auto f2 = write_report(r2, cfg, d2);
    REQUIRE(f1.size() == f2.size());
    REQUIRE(!f1.empty());
    for (std::size_t i = 0; i < f1.size(); ++i) {
      CHECK(f1[i].filename() == f2[i].filename());
      CHECK(slurp(f1[i]) == slurp(f2[i]));
    }
    const auto json = nlohmann::json::parse(slurp(d1 / "report.json"));
    CHECK(json["kind"] == "kernel-verify");
    CHECK(json["pass"] == true);
    CHECK(json["config_source"] == kSmallKernel);
    fs::remove_all(d1);
    fs::remove_all(d2);
  }

  TEST_CASE("format selects the files") {
    ExperimentConfig cfg = experiment_from_tree(parse_config(std::string(kSmallKernel) + "\n"));
    cfg.format = ReportFormat::csv;
    const auto r = run_experiment(cfg);
    const fs::path d = fresh_dir("csv");
    for (const auto& p : write_report(r, cfg, d)) CHECK(p.extension() == ".csv");
    CHECK(!fs::exists(d / "report.json"));
    fs::remove_all(d);
  }

  TEST_CASE("sweep writes cells and a refinement table") {
    const std::string text = std::string("sweep.kernel.n = [64, 128]\n") + kSmallKernel;
    const fs::path d = fresh_dir("sweep");
    const auto out = run_sweep(parse_config(text), text, 2, d);
    CHECK(out.passed());
    CHECK(out.cells.size() == 2);
    CHECK(fs::exists(d / "cell_000" / "report.json"));
    CHECK(fs::exists(d / "cell_001" / "report.json"));
    CHECK(fs::exists(d / "aggregate.csv"));
    CHECK(fs::exists(d / "aggregate.json"));
    CHECK(!out.aggregate.rows.empty());
    CHECK(!out.refinement.rows.empty());
    fs::remove_all(d);
  }

  TEST_CASE("a failing cell does not stop the sweep") {
    const std::string text = std::string("sweep.kernel.box_length = [16.0, 4.0]\n") + kSmallKernel;
    const fs::path d = fresh_dir("sweep_fail");
    const auto out = run_sweep(parse_config(text), text, 1, d);
    CHECK(!out.passed());
    CHECK(out.errors[0].empty());
    CHECK(!out.errors[1].empty());
    fs::remove_all(d);
  }
}
