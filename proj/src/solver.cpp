#include "qg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "qg/checkpoint.hpp"
#include "qg/errors.hpp"
#include "qg/fft.hpp"
#include "qg/spectral.hpp"

namespace qg {

void SimConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("alpha must lie in (0, 2]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
  if (!(c_cfl > 0.0)) throw InvalidArgument("c_cfl must be positive");
  if (!(dt_rel > 0.0)) throw InvalidArgument("dt_rel must be positive");
  if (dt_fixed < 0.0) throw InvalidArgument("dt_fixed must be >= 0");
  if (!(initial.amplitude > 0.0)) throw InvalidArgument("amplitude must be positive");
  if (!(sigma > 2.0)) throw InvalidArgument("sigma must exceed 2");
  if (!(moment_q() > 2.0 / alpha)) throw InvalidArgument("q must exceed 2/alpha");
  if (!(sample_t0 > 0.0)) throw InvalidArgument("sample_t0 must be positive");
  if (samples_per_octave < 1) throw InvalidArgument("samples_per_octave must be >= 1");
  if (!(rescale_fraction > 0.0 && rescale_fraction <= 0.25)) {
    throw InvalidArgument("rescale_fraction must lie in (0, 1/4]");
  }
}

Stepper::Stepper(double alpha, const GridSpec& grid, double c_cfl, bool nonlinear,
                 std::filesystem::path dump_dir)
    : alpha_(alpha), grid_(grid), c_cfl_(c_cfl), nonlinear_(nonlinear),
      dump_dir_(std::move(dump_dir)) {
  symbol_.resize(grid.spectral_size());
  keep_.resize(grid.spectral_size());
  taper_.resize(grid.spectral_size());
  const int cols = grid.spectral_cols();
  for_each_mode(grid, [&](int i, int j, double k1, double k2) {
    const std::size_t idx = std::size_t(i) * cols + j;
    const double k = std::hypot(k1, k2);
    symbol_[idx] = std::pow(k, alpha);
    // Isotropic 2/3 rule: the disk |m| <= n/3 inside the usual square. The
    // inputs also get a smooth taper so a radial profile stays radial.
    const int m1 = grid.mode_index(i);
    keep_[idx] = 9 * (m1 * m1 + j * j) <= grid.n() * grid.n();
    const double rr = k / (grid.fundamental() * grid.n() / 3.0);
    taper_[idx] = keep_[idx] ? std::exp(-36.0 * std::pow(rr, 36)) : 0.0;
  });
}

double Stepper::nonlinear_spectral(const std::vector<Complex>& th,
                                   std::vector<Complex>& out) const {
  out.assign(th.size(), Complex{});
  if (!nonlinear_) return 0.0;
  const int cols = grid_.spectral_cols();
  const std::size_t np = grid_.physical_size();
  const Complex I(0.0, 1.0);

  std::vector<Complex> td(th.size()), u1h(th.size()), u2h(th.size());
  for_each_mode(grid_, [&](int i, int j, double k1, double k2) {
    const std::size_t idx = std::size_t(i) * cols + j;
    if (!keep_[idx]) return;
    const Complex v = taper_[idx] * th[idx];
    td[idx] = v;
    const double k = std::hypot(k1, k2);
    if (k == 0.0) return;
    u1h[idx] = -I * (k2 / k) * v;
    u2h[idx] = I * (k1 / k) * v;
  });
  std::vector<double> t(np), u1(np), u2(np);
  inverse_fft(grid_, td, t);
  inverse_fft(grid_, u1h, u1);
  inverse_fft(grid_, u2h, u2);
  double umax = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    umax = std::max(umax, std::hypot(u1[k], u2[k]));
    u1[k] *= t[k];
    u2[k] *= t[k];
  }
  forward_fft(grid_, u1, u1h);
  forward_fft(grid_, u2, u2h);
  for_each_mode(grid_, [&](int i, int j, double k1, double k2) {
    const std::size_t idx = std::size_t(i) * cols + j;
    if (keep_[idx]) out[idx] = -I * (k1 * u1h[idx] + k2 * u2h[idx]);
  });
  return umax;
}

Field Stepper::nonlinear_term(const Field& theta) const {
  const Field f = theta.has_spectral() ? theta : to_spectral(theta);
  std::vector<Complex> th(f.spectral().begin(), f.spectral().end()), out;
  nonlinear_spectral(th, out);
  return to_physical(Field::from_spectral(grid_, std::move(out)));
}

double Stepper::max_stable_dt(const Field& theta) const {
  if (!nonlinear_) return std::numeric_limits<double>::infinity();
  const VectorField u = riesz_velocity(theta);
  double umax = 0.0;
  const auto a = u.x1.physical(), b = u.x2.physical();
  for (std::size_t k = 0; k < a.size(); ++k) umax = std::max(umax, std::hypot(a[k], b[k]));
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return c_cfl_ * grid_.spacing() / umax;
}

SimState Stepper::step(const SimState& state, double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  if (!(state.theta.grid() == grid_)) throw InvalidArgument("step: grid mismatch");
  const Field f = state.theta.has_spectral() ? state.theta : to_spectral(state.theta);
  const std::vector<Complex> th(f.spectral().begin(), f.spectral().end());
  const std::size_t m = th.size();

  std::vector<double> e1(m), e2(m);
  for (std::size_t k = 0; k < m; ++k) {
    e1[k] = std::exp(-0.5 * dt * symbol_[k]);
    e2[k] = e1[k] * e1[k];
  }

  std::vector<Complex> a, b, c, d, tmp(m);
  const double umax = nonlinear_spectral(th, a);
  if (umax > 0.0 && dt > c_cfl_ * grid_.spacing() / umax * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "CFL violated: dt = " << dt << " > " << c_cfl_ << " h / max|u| = "
        << c_cfl_ * grid_.spacing() / umax;
    throw CflError(msg.str());
  }
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e1[k] * (th[k] + 0.5 * dt * a[k]);
  nonlinear_spectral(tmp, b);
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e1[k] * th[k] + 0.5 * dt * b[k];
  nonlinear_spectral(tmp, c);
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e2[k] * th[k] + dt * e1[k] * c[k];
  nonlinear_spectral(tmp, d);

  bool finite = true;
  for (std::size_t k = 0; k < m; ++k) {
    tmp[k] = e2[k] * th[k] +
             dt / 6.0 * (e2[k] * a[k] + 2.0 * e1[k] * (b[k] + c[k]) + d[k]);
    finite = finite && std::isfinite(tmp[k].real()) && std::isfinite(tmp[k].imag());
  }
  if (!finite) {
    const auto dir = dump_dir_.empty() ? std::filesystem::temp_directory_path() : dump_dir_;
    std::ostringstream name;
    name << "qg_nan_dump_step" << state.step_count << ".bin";
    const auto path = dir / name.str();
    std::string where = path.string();
    try {
      write_checkpoint(path, f, state.t, alpha_);
    } catch (const Error&) {
      where = "(dump failed)";
    }
    throw NumericalError("non-finite state after step " + std::to_string(state.step_count + 1) +
                         " at t = " + std::to_string(state.t) + "; last good state: " + where);
  }
  return {state.t + dt, to_physical(Field::from_spectral(grid_, std::move(tmp))),
          state.step_count + 1};
}

SimState step(const SimState& state, double dt, const SimConfig& config) {
  return Stepper(config.alpha, state.theta.grid(), config.c_cfl, config.nonlinear,
                 config.dump_dir)
      .step(state, dt);
}

Field linear_solution(const InitialProfile& profile, double alpha, double t,
                      const GridSpec& grid) {
  return to_physical(synthesize(grid, [&](double k1, double k2) {
    return std::exp(-t * std::pow(std::hypot(k1, k2), alpha)) * profile.transform(k1, k2);
  }));
}

namespace {

std::vector<double> sample_schedule(const SimConfig& cfg) {
  std::vector<double> ts;
  if (!cfg.sample_times.empty()) {
    for (double s : cfg.sample_times) {
      if (s > 0.0 && s < cfg.t_end) ts.push_back(s);
    }
  } else {
    for (int k = 0;; ++k) {
      const double s = cfg.sample_t0 * std::exp2(double(k) / cfg.samples_per_octave);
      if (s >= cfg.t_end) break;
      ts.push_back(s);
    }
  }
  if (cfg.t_end > 0.0) ts.push_back(cfg.t_end);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// theta = G(t) * theta_0 + v. The linear part is rebuilt exactly on the
// doubled box; v is low-passed to |m| < n/4, which makes the even-index
// subsample exact, and set to zero outside the old box.
Field rescale_state(const Field& theta, const InitialProfile& profile, double alpha, double t,
                    RescaleEvent& event) {
  const GridSpec& g = theta.grid();
  const GridSpec g2 = g.doubled();
  const int n = g.n(), cols = g.spectral_cols();

  const Field lin = to_spectral(linear_solution(profile, alpha, t, g));
  const auto th = theta.has_spectral() ? theta.spectral() : to_spectral(theta).spectral();
  std::vector<Complex> v(th.size()), v_lp(th.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = th[k] - lin.spectral()[k];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cols; ++j) {
      const std::size_t idx = std::size_t(i) * cols + j;
      if (4 * std::abs(g.mode_index(i)) < n && 4 * j < n) v_lp[idx] = v[idx];
    }
  }
  const Field vf = to_physical(Field::from_spectral(g, v));
  const Field vl = to_physical(Field::from_spectral(g, v_lp));
  double dropped = 0.0;
  for (std::size_t k = 0; k < g.physical_size(); ++k) {
    dropped += std::abs(vf.physical()[k] - vl.physical()[k]);
  }
  event.trailing_mass = dropped * g.cell_area();

  const Field lin2 = linear_solution(profile, alpha, t, g2);
  std::vector<double> out(lin2.physical().begin(), lin2.physical().end());
  const auto vv = vl.physical();
  for (int i = n / 4; i < 3 * n / 4; ++i) {
    for (int j = n / 4; j < 3 * n / 4; ++j) {
      out[std::size_t(i) * n + j] += vv[std::size_t(2 * (i - n / 4)) * n + 2 * (j - n / 4)];
    }
  }
  return to_spectral(Field::from_physical(g2, std::move(out)));
}

void check_invariants(Trajectory& tr, const SimState& s) {
  const double m = mass(s.theta);
  const double scale = std::max(std::abs(tr.initial_mass), 1e-300);
  if (std::abs(m - tr.initial_mass) > 1e-11 * scale) {
    std::ostringstream msg;
    msg << "t=" << s.t << ": mass drift " << (m - tr.initial_mass) / scale;
    tr.violations.push_back(msg.str());
  }
  const double lo = min_value(s.theta);
  if (lo < -1e-8 * tr.initial_max) {
    std::ostringstream msg;
    msg << "t=" << s.t << ": min theta " << lo << " below -1e-8 max|theta_0|";
    tr.violations.push_back(msg.str());
  }
  if (max_abs(s.theta) > tr.initial_max * (1.0 + 1e-6)) {
    std::ostringstream msg;
    msg << "t=" << s.t << ": max|theta| grew above max|theta_0|";
    tr.violations.push_back(msg.str());
  }
}

}  // namespace

Trajectory integrate(const SimConfig& cfg) {
  cfg.validate();
  Trajectory tr;
  tr.config = cfg;
  tr.profile = make_profile(cfg.initial);
  SimState state{0.0, make_initial_data(tr.profile, cfg.grid), 0};
  state.theta = to_physical(state.theta);
  tr.initial_mass = mass(state.theta);
  tr.initial_max = max_abs(state.theta);
  tr.samples.push_back(state);

  const std::vector<double> targets = sample_schedule(cfg);
  auto stepper = std::make_unique<Stepper>(cfg.alpha, cfg.grid, cfg.c_cfl, cfg.nonlinear,
                                           cfg.dump_dir);
  // Rescale as soon as the solution outgrows the box, so every recorded
  // sample satisfies t^{1/alpha} <= fraction * L.
  const auto maybe_rescale = [&] {
    while (cfg.rescale && std::pow(state.t, 1.0 / cfg.alpha) >
                              cfg.rescale_fraction * stepper->grid().box_length()) {
      const double L = stepper->grid().box_length();
      RescaleEvent ev{state.t, L, 2.0 * L, 0.0};
      state.theta = to_physical(rescale_state(state.theta, tr.profile, cfg.alpha, state.t, ev));
      tr.trailing_mass += ev.trailing_mass;
      tr.rescales.push_back(ev);
      stepper = std::make_unique<Stepper>(cfg.alpha, state.theta.grid(), cfg.c_cfl,
                                          cfg.nonlinear, cfg.dump_dir);
    }
  };
  std::size_t next = 0;
  while (next < targets.size()) {
    double dt = cfg.dt_fixed > 0.0 ? cfg.dt_fixed : cfg.dt_rel * (1.0 + state.t);
    dt = std::min(dt, stepper->max_stable_dt(state.theta));
    const double target = targets[next];
    bool hit = false;
    if (state.t + dt >= target * (1.0 - 1e-13)) {
      dt = target - state.t;
      hit = true;
    }
    state = stepper->step(state, dt);
    if (hit) {
      state.t = target;
      ++next;
    }
    maybe_rescale();
    if (hit || cfg.sample_every_step) {
      check_invariants(tr, state);
      tr.samples.push_back(state);
    }
  }
  tr.total_steps = state.step_count;
  return tr;
}

}  // namespace qg
