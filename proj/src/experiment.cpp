#include "qg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "qg/duhamel.hpp"
#include "qg/ensemble.hpp"
#include "qg/errors.hpp"
#include "qg/kernel.hpp"
#include "qg/spectral.hpp"

namespace qg {
namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

std::string tag(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double mass_drift(const Trajectory& tr) {
  double drift = 0.0;
  for (const auto& s : tr.samples) {
    drift = std::max(drift, std::abs(mass(s.theta) - tr.initial_mass) / std::abs(tr.initial_mass));
  }
  return drift;
}

ConfigTree rescale_json(const Trajectory& tr) {
  ConfigTree a = ConfigTree::array();
  for (const auto& r : tr.rescales) {
    a.push_back({{"t", r.t},
                 {"old_length", r.old_length},
                 {"new_length", r.new_length},
                 {"trailing_mass", r.trailing_mass}});
  }
  return a;
}

ExperimentResult simulate(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const Trajectory tr = integrate(cfg.sim);
  const DecayReport rep = build_decay_report(tr);
  res.summary["decay"] = to_json(rep);
  res.summary["rescales"] = rescale_json(tr);
  res.summary["total_steps"] = tr.total_steps;
  res.summary["trailing_mass"] = tr.trailing_mass;
  res.tables.push_back(decay_table(rep));
  CsvTable rs{"rescales", {"t", "old_length", "new_length", "trailing_mass"}, {}};
  for (const auto& r : tr.rescales) rs.add_row({r.t, r.old_length, r.new_length, r.trailing_mass});
  res.tables.push_back(std::move(rs));
  for (const auto& f : rep.fits) res.measures.push_back({f.name + "_exponent", f.fit.exponent, f.expected});
  for (const auto& v : rep.verdicts) {
    if (v.name == "theorem1_ratio") res.measures.push_back({"theorem1_ratio_slope", v.value, 0.0});
  }
  res.verdicts = rep.verdicts;
  res.verdicts.push_back({"invariants", tr.violations.empty(), double(tr.violations.size()), 0.0,
                          "sign, maximum-principle and mass breaches at samples"});
  res.notes = rep.notes;
  return res;
}

ExperimentResult theorem1(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const Trajectory tr = integrate(cfg.sim);
  const auto& p = cfg.theorem1;
  const Theorem1Report th =
      theorem1_residual(tr, p.t_first, p.slope_tolerance, p.excess_tolerance);
  CsvTable t{"theorem1", {"t", "residual_R", "ratio", "contamination", "trusted"}, {}};
  for (std::size_t i = 0; i < th.times.size(); ++i) {
    t.add_row({th.times[i], th.residual[i], th.ratio[i], th.contamination[i],
               th.trusted[i] ? 1.0 : 0.0});
  }
  res.tables.push_back(std::move(t));
  res.summary["log_power"] = th.power;
  res.summary["ratio_slope"] = th.slope;
  res.summary["first_decade_constant"] = th.first_decade_constant;
  res.summary["worst_later_excess"] = th.worst_later_excess;
  res.summary["rescales"] = rescale_json(tr);
  res.summary["total_steps"] = tr.total_steps;
  res.measures.push_back({"ratio_slope", th.slope, 0.0});
  res.measures.push_back({"log_power", th.power, th.power});
  res.verdicts.push_back(th.verdict);
  const double drift = mass_drift(tr);
  res.verdicts.push_back({"mass_conservation", drift <= 1e-11, drift, 1e-11,
                          "max relative mass drift over samples"});
  res.notes = th.notes;
  for (const auto& v : tr.violations) res.notes.push_back("invariant: " + v);
  return res;
}

ExperimentResult linear_lemma(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const auto& p = cfg.linear;
  std::vector<double> times;
  for (int k = 0; k < p.samples; ++k) {
    times.push_back(p.t_min * std::pow(p.t_max / p.t_min, double(k) / (p.samples - 1)));
  }
  const InitialProfile profile = make_profile(cfg.sim.initial);
  const LinearLemmaReport lr =
      linear_lemma_check(profile, cfg.sim.alpha, times, p.n, p.box_factor);
  CsvTable t{"linear_lemma", {"t", "residual", "kernel_moment", "contamination", "trusted"}, {}};
  for (std::size_t i = 0; i < lr.times.size(); ++i) {
    t.add_row({lr.times[i], lr.residual[i], lr.kernel_moment[i], lr.contamination[i],
               lr.trusted[i] ? 1.0 : 0.0});
  }
  res.tables.push_back(std::move(t));
  res.summary["sup"] = lr.sup;
  res.summary["slope"] = lr.slope;
  res.measures.push_back({"residual_slope", lr.slope, 0.0});
  res.verdicts.push_back({"linear_lemma_bounded", lr.slope <= p.slope_tolerance, lr.slope,
                          p.slope_tolerance, "slope of log R_lin against log t"});
  return res;
}

ExperimentResult kernel_verify(const ExperimentConfig& cfg, int jobs) {
  const auto& p = cfg.kernel;
  const GridSpec grid(p.n, p.box_length);
  std::vector<ExperimentResult> parts(p.alphas.size());
  parallel_for(
      int(p.alphas.size()),
      [&](int idx) {
        ExperimentResult& res = parts[idx];
        const double a = p.alphas[idx];
        const std::string at = tag("alpha=%g", a);
        const bool closed = (a == 1.0 || a == 2.0);
        const KernelRoute route = closed ? KernelRoute::closed_form : KernelRoute::radial_quadrature;
        const KernelSpec spec(a, p.t);
        const KernelComparison c = compare_kernel(spec, grid, route);

        CsvTable t{"kernel_" + tag("alpha%g", a), {"x1", "x2", "grid", "reference", "relative_error"}, {}};
        CsvTable radial{"kernel_radial_" + tag("alpha%g", a), {"r", "value"}, {}};
        for (std::size_t i = 0; i < c.x1.size(); ++i) {
          t.add_row({c.x1[i], c.x2[i], c.grid_value[i], c.reference[i],
                     std::abs(c.grid_value[i] / c.reference[i] - 1.0)});
          if (c.x2[i] == 0.0) radial.add_row({c.x1[i], c.reference[i]});
        }
        res.tables.push_back(std::move(t));
        res.tables.push_back(std::move(radial));
        const std::string ref = closed ? (a == 1.0 ? "Poisson closed form" : "Gaussian closed form")
                                       : "radial quadrature";
        res.measures.push_back({"max_relative_error " + at, c.max_relative_error, 0.0});
        res.measures.push_back({"mass_defect " + at, c.mass_defect, 0.0});
        res.verdicts.push_back({"grid_vs_reference " + at, c.max_relative_error <= p.tolerance,
                                c.max_relative_error, p.tolerance,
                                "pointwise relative error on |x| <= L/4 against periodized " + ref});
        res.verdicts.push_back({"unit_mass " + at, std::abs(c.mass_defect) <= 1e-6,
                                std::abs(c.mass_defect), 1e-6, "Riemann-sum mass minus one"});
        res.verdicts.push_back({"positivity " + at, c.min_ratio >= -1e-10, c.min_ratio, -1e-10,
                                "min / max of the grid kernel"});

        const double ell = spec.length_scale();
        for (double ts : p.scaling_times) {
          const double l = std::pow(ts, 1.0 / a);
          const std::vector<double> radii{0.0, 0.25 * l, 0.5 * l, l, 2.0 * l, 4.0 * l, 8.0 * l};
          const double dev = scaling_check(a, ts, radii, route);
          res.verdicts.push_back({"scaling " + at + tag(" t=%g", ts), dev <= p.scaling_tolerance, dev,
                                  p.scaling_tolerance, "max |G(t,r) - t^{-2/alpha} G(1, r t^{-1/alpha})| / G(t,0)"});
        }
        if (a < 2.0) {
          for (int order = 0; order <= 1; ++order) {
            const TailFit f = tail_exponent(KernelSpec(a, 1.0, order, 0));
            const std::string name = tag("tail_slope alpha=%g", a) + (order ? " |beta|=1" : " |beta|=0");
            res.measures.push_back({name, f.slope, f.expected});
            res.verdicts.push_back({name, std::abs(f.slope - f.expected) <= p.tail_tolerance, f.slope,
                                    p.tail_tolerance, "expected " + format_double(f.expected)});
          }
        }
        res.summary[at] = {{"max_relative_error", c.max_relative_error},
                           {"mass_defect", c.mass_defect},
                           {"min_ratio", c.min_ratio},
                           {"length_scale", ell},
                           {"reference", ref}};
      },
      jobs);
  ExperimentResult res;
  for (auto& part : parts) {
    for (auto& t : part.tables) res.tables.push_back(std::move(t));
    for (auto& m : part.measures) res.measures.push_back(std::move(m));
    for (auto& v : part.verdicts) res.verdicts.push_back(std::move(v));
    for (auto it = part.summary.begin(); it != part.summary.end(); ++it) res.summary[it.key()] = *it;
  }
  return res;
}

ExperimentResult duhamel(const ExperimentConfig& cfg) {
  ExperimentResult res;
  const auto& p = cfg.duhamel;
  SimConfig base = cfg.sim;
  if (base.t_end <= 0.0) throw ConfigError("sim.t_end", "duhamel-check needs a positive t_end");
  if (base.dt_fixed <= 0.0) throw ConfigError("sim.dt", "duhamel-check needs a fixed step");
  base.rescale = false;
  base.sample_every_step = true;

  CsvTable t{"duhamel", {"dt", "max_residual"}, {}};
  std::vector<double> residuals;
  double dt = base.dt_fixed;
  for (int h = 0; h <= p.halvings; ++h, dt *= 0.5) {
    SimConfig c = base;
    c.dt_fixed = dt;
    const double r = duhamel_residual(integrate(c), p.quadrature_order);
    residuals.push_back(r);
    t.add_row({dt, r});
    res.verdicts.push_back({tag("duhamel_residual dt=%g", dt), r <= p.residual_tolerance, r,
                            p.residual_tolerance, "relative L2 residual of the mild formulation"});
    if (h > 0) {
      const double prev = residuals[h - 1];
      res.verdicts.push_back({tag("duhamel_refinement dt=%g", dt), r < prev, r / prev, 1.0,
                              "residual ratio after halving dt"});
    }
  }
  res.tables.push_back(std::move(t));
  res.summary["residuals"] = residuals;

  InitialDataParams ip = cfg.sim.initial;
  ip.amplitude = p.picard_epsilon;
  const Field theta0 = make_initial_data(ip, cfg.sim.grid);
  const auto seq = picard_sequence(theta0, cfg.sim.alpha, p.picard_time, p.picard_iterations,
                                   p.picard_panels, p.quadrature_order);
  CsvTable pt{"picard", {"iterate", "difference"}, {}};
  std::vector<double> diffs;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    diffs.push_back(lp_norm(subtract(seq[k], seq[k - 1]), 2.0) / lp_norm(seq[k], 2.0));
    pt.add_row({double(k), diffs.back()});
  }
  res.tables.push_back(std::move(pt));
  res.summary["picard_differences"] = diffs;
  // Contraction factor over differences still above the roundoff floor.
  double contraction = 0.0;
  for (std::size_t k = 1; k < diffs.size(); ++k) {
    if (diffs[k - 1] > 1e-13) contraction = std::max(contraction, diffs[k] / diffs[k - 1]);
  }
  res.measures.push_back({"picard_contraction", contraction, kNone});
  res.verdicts.push_back({"picard_geometric", !diffs.empty() && contraction <= 0.5, contraction, 0.5,
                          "max ratio of successive Picard differences"});
  return res;
}

ExperimentResult inequality_suite(const ExperimentConfig& cfg, int jobs) {
  InequalitySuiteConfig ic = cfg.inequality;
  ic.jobs = jobs;
  const InequalitySuiteReport rep = run_inequality_suite(ic);
  ExperimentResult res;
  res.summary = to_json(rep);
  for (const auto& s : rep.series) {
    res.tables.push_back(ensemble_table(s));
    if (!s.fine_values.empty()) res.measures.push_back({s.name + " refinement_change", s.refinement_change, 0.0});
    if (s.aliasing_warnings > 0) {
      res.notes.push_back(s.name + ": " + std::to_string(s.aliasing_warnings) +
                          " members with more than 1% aliased energy in the half-power field");
    }
  }
  res.measures.push_back({"weight_commutator_order", rep.commutator_order, 2.0});
  res.verdicts = rep.verdicts;
  res.notes.push_back("weight commutator with coefficient alpha(alpha-1) instead of alpha^2 differs by " +
                      format_double(rep.commutator.printed_discrepancy) + " (relative)");
  return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  ExperimentResult res;
  switch (cfg.kind) {
    case ExperimentKind::simulate: res = simulate(cfg); break;
    case ExperimentKind::theorem1: res = theorem1(cfg); break;
    case ExperimentKind::linear_lemma: res = linear_lemma(cfg); break;
    case ExperimentKind::kernel_verify: res = kernel_verify(cfg, jobs); break;
    case ExperimentKind::inequality_suite: res = inequality_suite(cfg, jobs); break;
    case ExperimentKind::duhamel_check: res = duhamel(cfg); break;
  }
  res.kind = to_string(cfg.kind);
  return res;
}

bool SweepOutcome::passed() const {
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!errors[i].empty() || !results[i].passed()) return false;
  }
  return true;
}

SweepOutcome run_sweep(const ConfigTree& tree, const std::string& source_text, int jobs,
                       const std::filesystem::path& out_dir) {
  SweepOutcome out;
  out.cells = expand_sweep(tree);
  const std::size_t n = out.cells.size();
  out.results.resize(n);
  out.errors.resize(n);
  std::vector<ExperimentConfig> configs(n);
  const auto cell_dir = [&](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cell_%03zu", i);
    return out_dir / buf;
  };
  parallel_for(
      int(n),
      [&](int i) {
        try {
          configs[i] = experiment_from_tree(out.cells[i].tree);
          configs[i].source_text = source_text;
          out.results[i] = run_experiment(configs[i], 1);
          write_report(out.results[i], configs[i], cell_dir(i));
        } catch (const std::exception& e) {
          out.errors[i] = e.what();
        }
      },
      jobs);

  out.aggregate = {"aggregate", {"cell", "label", "measure", "measured", "predicted", "difference"}, {}};
  ConfigTree cells = ConfigTree::array();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = cell_dir(i).filename().string();
    ConfigTree c{{"cell", id}, {"label", out.cells[i].label}};
    if (!out.errors[i].empty()) {
      c["error"] = out.errors[i];
      out.aggregate.rows.push_back({id, out.cells[i].label, "error", "nan", "nan", "nan"});
    } else {
      c["pass"] = out.results[i].passed();
      c["failures"] = out.results[i].failures();
      for (const auto& m : out.results[i].measures) {
        out.aggregate.rows.push_back({id, out.cells[i].label, m.name, format_double(m.measured),
                                      format_double(m.predicted),
                                      format_double(m.measured - m.predicted)});
      }
    }
    cells.push_back(std::move(c));
  }

  // Refinement deltas: cells equal up to an axis named "*.n" or "n".
  out.refinement = {"refinement", {"group", "measure", "n_coarse", "n_fine", "coarse", "fine", "relative_change"}, {}};
  std::map<std::string, std::vector<std::pair<int, std::size_t>>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.errors[i].empty()) continue;
    std::string rest;
    int res_n = -1;
    std::string label = out.cells[i].label;
    std::size_t start = 0;
    while (start <= label.size() && !label.empty()) {
      const auto comma = label.find(',', start);
      const std::string part = label.substr(start, comma - start);
      const auto eq = part.find('=');
      const std::string key = part.substr(0, eq);
      if (key == "n" || (key.size() > 2 && key.compare(key.size() - 2, 2, ".n") == 0)) {
        res_n = std::stoi(part.substr(eq + 1));
      } else {
        rest += (rest.empty() ? "" : ",") + part;
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (res_n > 0) groups[rest].push_back({res_n, i});
  }
  for (auto& [group, members] : groups) {
    std::sort(members.begin(), members.end());
    for (std::size_t k = 1; k < members.size(); ++k) {
      const auto& a = out.results[members[k - 1].second];
      const auto& b = out.results[members[k].second];
      for (const auto& ma : a.measures) {
        for (const auto& mb : b.measures) {
          if (ma.name != mb.name) continue;
          out.refinement.rows.push_back(
              {group, ma.name, std::to_string(members[k - 1].first), std::to_string(members[k].first),
               format_double(ma.measured), format_double(mb.measured),
               format_double(std::abs(mb.measured - ma.measured) / std::abs(ma.measured))});
        }
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "aggregate.csv", std::ios::binary);
    write_csv(f, out.aggregate);
  }
  if (!out.refinement.rows.empty()) {
    std::ofstream f(out_dir / "refinement.csv", std::ios::binary);
    write_csv(f, out.refinement);
  }
  {
    std::ofstream f(out_dir / "aggregate.json", std::ios::binary);
    f << ConfigTree{{"cells", cells}, {"pass", out.passed()}}.dump(2) << "\n";
  }
  return out;
}

}  // namespace qg
