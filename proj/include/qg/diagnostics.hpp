#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qg/fit.hpp"
#include "qg/solver.hpp"

namespace qg {

struct WeightedNorm {
  double value = 0.0;
  /// max_{|x| > 3L/8} |f| / max |f| (0 for the zero field).
  double contamination = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum over grid points with |x| <= R of (|x|^mu |f|)^p h^2)^{1/p}; p = inf
/// gives the windowed maximum. Throws InvalidArgument if R > L/4 or p < 1.
WeightedNorm weighted_norm(const Field& f, double mu, double p, double R);

/// ||(-Delta)^{sigma/2} f||_{L^2} from the spectrum, together with the share of
/// the squared norm carried by modes outside the dealiasing square.
struct SobolevNorm {
  double value = 0.0;
  double outer_fraction = 0.0;
};
SobolevNorm sobolev_norm(const Field& f, double sigma);

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Thresholds on the contamination index; above them a sample is untrusted.
struct ContaminationLimits {
  double residual = 1e-3;  ///< difference fields (R, R_lin)
  double moment = 1e-2;    ///< solution fields (moments)
};

struct LinearLemmaReport {
  std::vector<double> times;
  std::vector<double> residual;       ///< R_lin(t)
  std::vector<double> kernel_moment;  ///< ||x|^2 M G_alpha(t)|| on the same window
  std::vector<double> contamination;
  std::vector<bool> trusted;
  double sup = 0.0;
  double slope = 0.0;  ///< of log R_lin against log t over trusted samples
};

/// R_lin(t) = ||x|^2 (G(t) * theta_0 - M G(t))||_{L^2(|x| <= L/4)} on a per-time
/// box L = max(box_factor t^{1/alpha}, 8 * extent) with n points.
LinearLemmaReport linear_lemma_check(const InitialProfile& theta0, double alpha,
                                     const std::vector<double>& times, int n = 256,
                                     double box_factor = 32.0,
                                     const ContaminationLimits& limits = {});

enum class MomentSource { solution, kernel };

struct MomentGrowthReport {
  std::vector<double> times;
  std::vector<double> moments;
  std::vector<double> contamination;
  std::vector<bool> trusted;
  RateFit fit;            ///< against 1 + t over trusted samples with t >= t_min
  double expected = 0.0;  ///< 2 / (alpha q)
  Verdict verdict;
};

/// ||x|^2 theta(t)||_{L^q} on the window |x| <= min(L/4, 4 t^{1/alpha}). With
/// MomentSource::kernel the samples are replaced by M G_alpha(t) on the same grids.
MomentGrowthReport moment_growth_check(const Trajectory& trajectory, double q, double t_min = 10.0,
                                       MomentSource source = MomentSource::solution,
                                       const ContaminationLimits& limits = {});

struct Theorem1Report {
  double power = 0.0;  ///< 3/2 at alpha = 1, 1/2 below
  std::vector<double> times;
  std::vector<double> residual;  ///< R(t)
  std::vector<double> ratio;     ///< R(t) / (log(2 + t))^power
  std::vector<double> contamination;
  std::vector<bool> trusted;
  std::vector<std::string> notes;
  double slope = 0.0;           ///< of log ratio against log log(2 + t), final two decades
  double first_decade_constant = 0.0;
  double worst_later_excess = 0.0;  ///< max later ratio / constant
  Verdict verdict;
};

/// R(t) = ||x|^2 (theta(t) - M G_alpha(t))||_{L^2(|x| <= L/4)} with the kernel
/// synthesized band-limited on each sample's grid, M the discrete mass at t = 0.
/// The first decade is [t_first, 10 t_first].
Theorem1Report theorem1_residual(const Trajectory& trajectory, double t_first = 1.0,
                                 double slope_tolerance = 0.1, double excess_tolerance = 0.2,
                                 const ContaminationLimits& limits = {});

struct SobolevDecayReport {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<bool> resolved;
  RateFit fit;
  double expected = 0.0;  ///< -(1 + sigma) / alpha
  Verdict verdict;
};

/// Fits ||(-Delta)^{sigma/2} theta|| against 1 + t for t >= t_min. Samples with
/// more than `outer_limit` of the squared norm beyond the dealiasing square, or
/// an underflowed spectrum, are excluded and noted.
SobolevDecayReport sobolev_decay_check(const Trajectory& trajectory, double sigma,
                                       double t_min = 10.0, double outer_limit = 1e-6);

struct DecaySample {
  double t = 0.0;
  double box_length = 0.0;
  double mass = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double sobolev = 0.0;
  double moment_q = 0.0;
  double residual_R = 0.0;  ///< NaN when the kernel is outside its resolution window
  double contamination = 0.0;
};

struct NamedFit {
  std::string name;
  RateFit fit;
  double expected = 0.0;
};

struct DecayReport {
  double alpha = 0.0;
  double sigma = 0.0;
  double q = 0.0;
  double initial_mass = 0.0;
  std::vector<DecaySample> samples;
  std::vector<NamedFit> fits;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
};

/// Per-sample norms plus the L-infinity, moment, Sobolev and residual-ratio checks.
DecayReport build_decay_report(const Trajectory& trajectory);

}  // namespace qg
