#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "qg/field.hpp"
#include "qg/initial_data.hpp"

namespace qg {

struct SimConfig {
  double alpha = 1.0;
  GridSpec grid{256, 80.0};
  double t_end = 0.0;
  double c_cfl = 0.5;           ///< dt <= c_cfl * h / max|u|
  double dt_rel = 0.02;         ///< dt <= dt_rel * (1 + t)
  double dt_fixed = 0.0;        ///< if > 0, use this step (still CFL-capped)
  InitialDataParams initial;
  double sigma = 3.0;           ///< Sobolev diagnostic index, > 2
  double q = 0.0;               ///< weighted-moment exponent; 0 selects 2/alpha + 1
  double sample_t0 = 1.0;       ///< geometric sampling t_k = t0 2^{k / per_octave}
  int samples_per_octave = 4;
  std::vector<double> sample_times;  ///< explicit sample times (overrides the geometric grid)
  bool sample_every_step = false;
  bool nonlinear = true;
  bool rescale = true;
  double rescale_fraction = 1.0 / 16.0;  ///< double L once t^{1/alpha} > fraction * L
  std::filesystem::path dump_dir;        ///< NaN dumps; empty selects the temp directory

  double moment_q() const { return q > 0.0 ? q : 2.0 / alpha + 1.0; }
  /// Throws InvalidArgument on violated invariants.
  void validate() const;
};

struct SimState {
  double t = 0.0;
  Field theta;
  long step_count = 0;
};

struct RescaleEvent {
  double t;
  double old_length;
  double new_length;
  double trailing_mass;  ///< L1 mass of the perturbation discarded by the resampling
};

struct Trajectory {
  SimConfig config;
  InitialProfile profile;
  double initial_mass = 0.0;
  double initial_max = 0.0;
  std::vector<SimState> samples;
  std::vector<RescaleEvent> rescales;
  std::vector<std::string> violations;  ///< invariant breaches seen at samples
  long total_steps = 0;
  double trailing_mass = 0.0;
};

/// Integrating-factor RK4 for theta_t + |xi|^alpha theta = N(theta),
/// N = -div(theta u), u = perp-grad (-Delta)^{-1/2} theta.
class Stepper {
 public:
  Stepper(double alpha, const GridSpec& grid, double c_cfl = 0.5, bool nonlinear = true,
          std::filesystem::path dump_dir = {});

  const GridSpec& grid() const noexcept { return grid_; }

  /// Throws CflError if dt exceeds c_cfl * h / max|u|, NumericalError on
  /// NaN/Inf (after dumping the offending state).
  SimState step(const SimState& state, double dt) const;

  /// c_cfl * h / max|u|; infinite when the velocity vanishes or the
  /// nonlinearity is disabled.
  double max_stable_dt(const Field& theta) const;

  /// -div(theta u) with dealiased (disk |m| <= n/3, tapered) inputs and product.
  Field nonlinear_term(const Field& theta) const;

  /// Spectral core of nonlinear_term; returns max|u| on the grid.
  double nonlinear_spectral(const std::vector<Complex>& theta_hat,
                            std::vector<Complex>& out) const;

 private:
  double alpha_;
  GridSpec grid_;
  double c_cfl_;
  bool nonlinear_;
  std::filesystem::path dump_dir_;
  std::vector<double> symbol_;  // |xi|^alpha per mode
  std::vector<char> keep_;      // dealiasing mask
  std::vector<double> taper_;   // input filter, zero outside the mask
};

/// Convenience wrapper building a Stepper from the config.
SimState step(const SimState& state, double dt, const SimConfig& config);

/// Exact linear flow G_alpha(t) * theta_0 as a band-limited field on `grid`.
Field linear_solution(const InitialProfile& profile, double alpha, double t,
                      const GridSpec& grid);

/// Runs to t_end, sampling at t = 0, the geometric grid and t_end.
Trajectory integrate(const SimConfig& config);

}  // namespace qg
