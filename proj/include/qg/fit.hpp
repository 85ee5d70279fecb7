#pragma once

#include <span>
#include <string>

namespace qg {

enum class RateModel {
  power,      ///< y = a t^b
  log_power,  ///< y = a (log(2 + t))^b
};

std::string to_string(RateModel model);

struct RateFit {
  RateModel model = RateModel::power;
  double exponent = 0.0;   ///< b
  double prefactor = 0.0;  ///< a
  double rms_residual = 0.0;
  double std_error = 0.0;  ///< standard error of b
  double ci_low = 0.0;     ///< 95% confidence interval for b
  double ci_high = 0.0;
  std::size_t samples = 0;
};

/// Least squares in log coordinates. Requires at least `min_samples` points
/// with t > 0, y > 0 and t_max >= 10^min_decades * t_min; throws
/// InsufficientSpan otherwise.
RateFit fit_rate(std::span<const double> t, std::span<const double> y, RateModel model,
                 std::size_t min_samples = 8, double min_decades = 1.0);

/// Plain least-squares line through (x, y); returns {slope, intercept, rms, slope std error}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  double slope_error = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace qg
