#include "qg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qg/errors.hpp"
#include "qg/kernel.hpp"
#include "qg/spectral.hpp"

namespace qg {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Window radius for moments: scales with the kernel so that the pure kernel
// gives an exactly self-similar series.
double moment_window(const GridSpec& g, double alpha, double t) {
  return std::min(g.box_length() / 4.0, 4.0 * std::pow(t, 1.0 / alpha));
}

Field kernel_times(double m, double alpha, double t, const GridSpec& grid) {
  return scale(kernel_on_grid(KernelSpec(alpha, t), grid, KernelSynthesis::band_limited), m);
}

}  // namespace

WeightedNorm weighted_norm(const Field& f, double mu, double p, double R) {
  const GridSpec& g = f.grid();
  if (!(p >= 1.0)) throw InvalidArgument("weighted_norm: p must be >= 1");
  if (!(R > 0.0)) throw InvalidArgument("weighted_norm: R must be positive");
  if (R > g.box_length() / 4.0 * (1.0 + 1e-12)) {
    throw InvalidArgument("weighted_norm: window R = " + fmt(R) + " exceeds the safe region L/4 = " +
                          fmt(g.box_length() / 4.0));
  }
  const Field ff = f.has_physical() ? f : to_physical(f);
  const auto v = ff.physical();
  const int n = g.n();
  const double outer = 0.375 * g.box_length();
  double acc = 0.0, peak = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = g.coordinate(i);
    for (int j = 0; j < n; ++j) {
      const double r = std::hypot(x1, g.coordinate(j));
      const double a = std::abs(v[std::size_t(i) * n + j]);
      peak = std::max(peak, a);
      if (r > outer) edge = std::max(edge, a);
      if (r > R) continue;
      const double w = mu == 0.0 ? a : std::pow(r, mu) * a;
      if (std::isinf(p)) {
        acc = std::max(acc, w);
      } else {
        acc += std::pow(w, p);
      }
    }
  }
  WeightedNorm out;
  out.value = std::isinf(p) ? acc : std::pow(acc * g.cell_area(), 1.0 / p);
  out.contamination = peak > 0.0 ? edge / peak : 0.0;
  return out;
}

SobolevNorm sobolev_norm(const Field& f, double sigma) {
  const Field s = f.has_spectral() ? f : to_spectral(f);
  const GridSpec& g = s.grid();
  const auto c = s.spectral();
  const int cols = g.spectral_cols();
  double total = 0.0, outer = 0.0;
  for_each_mode(g, [&](int i, int j, double k1, double k2) {
    const double w = (j == 0 || j == g.n() / 2) ? 1.0 : 2.0;
    const double k = std::hypot(k1, k2);
    if (k == 0.0) return;
    const double e = w * std::pow(k, 2.0 * sigma) * std::norm(c[std::size_t(i) * cols + j]);
    total += e;
    if (!dealias_keeps(g, i, j)) outer += e;
  });
  const double nn = double(g.n()) * g.n();
  SobolevNorm out;
  out.value = std::sqrt(total * g.cell_area() / nn);
  out.outer_fraction = total > 0.0 ? outer / total : 0.0;
  return out;
}

LinearLemmaReport linear_lemma_check(const InitialProfile& theta0, double alpha,
                                     const std::vector<double>& times, int n, double box_factor,
                                     const ContaminationLimits& limits) {
  if (box_factor < 16.0) throw InvalidArgument("linear_lemma_check: box_factor must be >= 16");
  const double M = theta0.mass();
  LinearLemmaReport rep;
  std::vector<double> lx, ly;
  for (double t : times) {
    if (!(t > 0.0)) throw InvalidArgument("linear_lemma_check: times must be positive");
    const double ell = std::pow(t, 1.0 / alpha);
    const GridSpec grid(n, std::max(box_factor * ell, 16.0 * theta0.extent()));
    check_resolution(KernelSpec(alpha, t), grid);
    // Point samples (aliases folded): band truncation of exp(-t|xi|^alpha) rings for small alpha.
    const Field diff = fold_synthesize(
        grid,
        [&](double k1, double k2) {
          const double decay = std::exp(-t * std::pow(k1 * k1 + k2 * k2, 0.5 * alpha));
          return decay * (theta0.transform(k1, k2) - M);
        },
        std::pow(36.0 / t, 1.0 / alpha));
    const double R = grid.box_length() / 4.0;
    const WeightedNorm w = weighted_norm(diff, 2.0, 2.0, R);
    const WeightedNorm kw = weighted_norm(scale(kernel_on_grid(KernelSpec(alpha, t), grid), M), 2.0, 2.0, R);
    const bool ok = w.contamination <= limits.residual;
    rep.times.push_back(t);
    rep.residual.push_back(w.value);
    rep.kernel_moment.push_back(kw.value);
    rep.contamination.push_back(w.contamination);
    rep.trusted.push_back(ok);
    if (ok) {
      rep.sup = std::max(rep.sup, w.value);
      lx.push_back(std::log(t));
      ly.push_back(std::log(w.value));
    }
  }
  if (lx.size() >= 2) rep.slope = fit_line(lx, ly).slope;
  return rep;
}

MomentGrowthReport moment_growth_check(const Trajectory& tr, double q, double t_min,
                                       MomentSource source, const ContaminationLimits& limits) {
  const double alpha = tr.config.alpha;
  if (!(q > 2.0 / alpha)) throw InvalidArgument("moment_growth_check: q must exceed 2/alpha");
  MomentGrowthReport rep;
  rep.expected = 2.0 / (alpha * q);
  std::vector<double> ft, fy;
  for (const auto& s : tr.samples) {
    if (s.t <= 0.0) continue;
    const GridSpec& g = s.theta.grid();
    double value = kNaN, cont = kNaN;
    try {
      const Field f = source == MomentSource::solution
                          ? s.theta
                          : kernel_times(tr.initial_mass, alpha, s.t, g);
      const WeightedNorm w = weighted_norm(f, 2.0, q, moment_window(g, alpha, s.t));
      value = w.value;
      cont = w.contamination;
    } catch (const ResolutionError&) {
    }
    const bool ok = std::isfinite(value) && cont <= limits.moment;
    rep.times.push_back(s.t);
    rep.moments.push_back(value);
    rep.contamination.push_back(cont);
    rep.trusted.push_back(ok);
    if (ok && s.t >= t_min) {
      ft.push_back(1.0 + s.t);
      fy.push_back(value);
    }
  }
  rep.fit = fit_rate(ft, fy, RateModel::power, 8, 1.0);
  rep.verdict.name = source == MomentSource::solution ? "moment_growth" : "moment_growth_kernel";
  rep.verdict.value = rep.fit.exponent;
  if (source == MomentSource::solution) {
    rep.verdict.tolerance = 0.05;
    rep.verdict.pass = rep.fit.exponent <= rep.expected + 0.05;
    rep.verdict.detail = "slope <= 2/(alpha q) + tol, 2/(alpha q) = " + fmt(rep.expected);
  } else {
    rep.verdict.tolerance = 0.02;
    rep.verdict.pass = std::abs(rep.fit.exponent - rep.expected) <= 0.02;
    rep.verdict.detail = "|slope - 2/(alpha q)| <= tol, 2/(alpha q) = " + fmt(rep.expected);
  }
  return rep;
}

Theorem1Report theorem1_residual(const Trajectory& tr, double t_first, double slope_tolerance,
                                 double excess_tolerance, const ContaminationLimits& limits) {
  const double alpha = tr.config.alpha;
  const double M = tr.initial_mass;
  Theorem1Report rep;
  rep.power = alpha == 1.0 ? 1.5 : 0.5;
  if (alpha > 1.0) rep.notes.push_back("alpha > 1 lies outside the theorem; power 1/2 used");
  for (const auto& s : tr.samples) {
    if (s.t <= 0.0) continue;
    const GridSpec& g = s.theta.grid();
    double R = kNaN, cont = kNaN;
    try {
      const Field diff = subtract(s.theta, kernel_times(M, alpha, s.t, g));
      const WeightedNorm w = weighted_norm(diff, 2.0, 2.0, g.box_length() / 4.0);
      R = w.value;
      cont = w.contamination;
    } catch (const ResolutionError& e) {
      rep.notes.push_back("t=" + fmt(s.t) + ": " + e.what());
    }
    const bool ok = std::isfinite(R) && cont <= limits.residual;
    if (std::isfinite(R) && !ok) {
      rep.notes.push_back("t=" + fmt(s.t) + ": contamination " + fmt(cont) + " above " +
                          fmt(limits.residual));
    }
    rep.times.push_back(s.t);
    rep.residual.push_back(R);
    rep.ratio.push_back(R / std::pow(std::log(2.0 + s.t), rep.power));
    rep.contamination.push_back(cont);
    rep.trusted.push_back(ok);
  }

  rep.verdict.name = "theorem1_ratio";
  rep.verdict.tolerance = slope_tolerance;
  const double t_end = rep.times.empty() ? 0.0 : rep.times.back();
  if (t_end < 100.0 * t_first) {
    throw InsufficientSpan("theorem1_residual: run must reach 100 t_first for two decades");
  }
  double c = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (!rep.trusted[i]) continue;
    const double t = rep.times[i];
    if (t >= t_first && t <= 10.0 * t_first) c = std::max(c, rep.ratio[i]);
    if (t >= t_end / 100.0 * (1.0 - 1e-12)) {
      lx.push_back(std::log(std::log(2.0 + t)));
      ly.push_back(std::log(rep.ratio[i]));
    }
  }
  if (c <= 0.0) throw InsufficientSpan("theorem1_residual: no trusted sample in the first decade");
  if (lx.size() < 8) throw InsufficientSpan("theorem1_residual: too few trusted late samples");
  rep.first_decade_constant = c;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (rep.trusted[i] && rep.times[i] > 10.0 * t_first) {
      rep.worst_later_excess = std::max(rep.worst_later_excess, rep.ratio[i] / c);
    }
  }
  rep.slope = fit_line(lx, ly).slope;
  rep.verdict.value = rep.slope;
  rep.verdict.pass =
      rep.slope <= slope_tolerance && rep.worst_later_excess <= 1.0 + excess_tolerance;
  rep.verdict.detail = "ratio slope vs log log(2+t) over final two decades <= " +
                       fmt(slope_tolerance) + "; later ratio / first-decade constant = " +
                       fmt(rep.worst_later_excess) + " <= " + fmt(1.0 + excess_tolerance);
  return rep;
}

SobolevDecayReport sobolev_decay_check(const Trajectory& tr, double sigma, double t_min,
                                       double outer_limit) {
  const double alpha = tr.config.alpha;
  SobolevDecayReport rep;
  rep.expected = -(1.0 + sigma) / alpha;
  std::vector<double> ft, fy;
  for (const auto& s : tr.samples) {
    const SobolevNorm sn = sobolev_norm(s.theta, sigma);
    const bool ok = sn.value > 0.0 && std::isfinite(sn.value) && sn.outer_fraction <= outer_limit;
    rep.times.push_back(s.t);
    rep.norms.push_back(sn.value);
    rep.resolved.push_back(ok);
    if (ok && s.t >= t_min) {
      ft.push_back(1.0 + s.t);
      fy.push_back(sn.value);
    }
  }
  rep.fit = fit_rate(ft, fy, RateModel::power, 8, 1.0);
  rep.verdict.name = "sobolev_decay";
  rep.verdict.value = rep.fit.exponent;
  rep.verdict.tolerance = 0.1 * std::abs(rep.expected);
  rep.verdict.pass = rep.fit.exponent <= rep.expected + rep.verdict.tolerance;
  rep.verdict.detail = "slope <= -(1+sigma)/alpha + 10%, -(1+sigma)/alpha = " + fmt(rep.expected);
  return rep;
}

DecayReport build_decay_report(const Trajectory& tr) {
  const SimConfig& cfg = tr.config;
  DecayReport rep;
  rep.alpha = cfg.alpha;
  rep.sigma = cfg.sigma;
  rep.q = cfg.moment_q();
  rep.initial_mass = tr.initial_mass;
  for (const auto& v : tr.violations) rep.notes.push_back("invariant: " + v);

  double drift = 0.0;
  for (const auto& s : tr.samples) {
    const GridSpec& g = s.theta.grid();
    DecaySample d;
    d.t = s.t;
    d.box_length = g.box_length();
    d.mass = mass(s.theta);
    d.linf = max_abs(s.theta);
    d.l2 = lp_norm(s.theta, 2.0);
    d.sobolev = sobolev_norm(s.theta, cfg.sigma).value;
    d.residual_R = kNaN;
    d.contamination = weighted_norm(s.theta, 0.0, 2.0, g.box_length() / 4.0).contamination;
    if (s.t > 0.0) {
      d.moment_q = weighted_norm(s.theta, 2.0, rep.q, moment_window(g, cfg.alpha, s.t)).value;
      try {
        const Field diff = subtract(s.theta, kernel_times(tr.initial_mass, cfg.alpha, s.t, g));
        const WeightedNorm w = weighted_norm(diff, 2.0, 2.0, g.box_length() / 4.0);
        d.residual_R = w.value;
        d.contamination = w.contamination;
      } catch (const ResolutionError&) {
      }
    } else {
      d.moment_q = weighted_norm(s.theta, 2.0, rep.q, g.box_length() / 4.0).value;
    }
    drift = std::max(drift, std::abs(d.mass - tr.initial_mass) / std::abs(tr.initial_mass));
    rep.samples.push_back(d);
  }
  rep.verdicts.push_back({"mass_conservation", drift <= 1e-11, drift, 1e-11,
                          "max relative mass drift over samples"});

  const double t_end = tr.samples.back().t;
  // L-infinity decay over the final decade.
  {
    // Final decade, widened to the last sample at or before t_end / 10.
    double t_start = 0.0;
    for (const auto& d : rep.samples) {
      if (d.t > 0.0 && d.t <= t_end / 10.0 * (1.0 + 1e-12)) t_start = d.t;
    }
    std::vector<double> t, y;
    for (const auto& d : rep.samples) {
      if (d.t >= t_start && d.t > 0.0) t.push_back(d.t), y.push_back(d.linf);
    }
    try {
      const RateFit f = fit_rate(t, y, RateModel::power, 8, 1.0 - 1e-9);
      const double expected = -2.0 / cfg.alpha;
      rep.fits.push_back({"linf", f, expected});
      rep.verdicts.push_back({"linf_decay", std::abs(f.exponent - expected) <= 0.1 * std::abs(expected),
                              f.exponent, 0.1 * std::abs(expected),
                              "exponent over final decade = -2/alpha within 10%"});
    } catch (const InsufficientSpan& e) {
      rep.notes.push_back(std::string("linf decay skipped: ") + e.what());
    }
  }
  try {
    const auto m = moment_growth_check(tr, rep.q);
    rep.fits.push_back({"moment_q", m.fit, m.expected});
    rep.verdicts.push_back(m.verdict);
  } catch (const InsufficientSpan& e) {
    rep.notes.push_back(std::string("moment growth skipped: ") + e.what());
  }
  try {
    const auto s = sobolev_decay_check(tr, cfg.sigma);
    rep.fits.push_back({"sobolev", s.fit, s.expected});
    rep.verdicts.push_back(s.verdict);
  } catch (const InsufficientSpan& e) {
    rep.notes.push_back(std::string("sobolev decay skipped: ") + e.what());
  }
  try {
    const auto th = theorem1_residual(tr);
    rep.verdicts.push_back(th.verdict);
    for (const auto& n : th.notes) rep.notes.push_back("theorem1: " + n);
  } catch (const InsufficientSpan& e) {
    rep.notes.push_back(std::string("theorem1 skipped: ") + e.what());
  }
  return rep;
}

}  // namespace qg
