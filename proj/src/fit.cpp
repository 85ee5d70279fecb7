#include "qg/fit.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <vector>

#include "qg/errors.hpp"

namespace qg {

std::string to_string(RateModel model) {
  return model == RateModel::power ? "power" : "log-power";
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need >= 2 points");
  const double m = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientSpan("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    ss += e * e;
  }
  f.rms = std::sqrt(ss / m);
  f.slope_error = x.size() > 2 ? std::sqrt(ss / (m - 2.0) / sxx) : 0.0;
  return f;
}

RateFit fit_rate(std::span<const double> t, std::span<const double> y, RateModel model,
                 std::size_t min_samples, double min_decades) {
  if (t.size() != y.size()) throw InvalidArgument("fit_rate: size mismatch");
  std::vector<double> lx, ly;
  double tmin = INFINITY, tmax = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    tmin = std::min(tmin, t[i]);
    tmax = std::max(tmax, t[i]);
    lx.push_back(model == RateModel::power ? std::log(t[i]) : std::log(std::log(2.0 + t[i])));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < std::max<std::size_t>(min_samples, 3)) {
    throw InsufficientSpan("fit_rate: " + std::to_string(lx.size()) + " usable samples, need " +
                           std::to_string(std::max<std::size_t>(min_samples, 3)));
  }
  if (tmax < std::pow(10.0, min_decades) * tmin * (1.0 - 1e-12)) {
    throw InsufficientSpan("fit_rate: samples span less than the required decades");
  }
  const LineFit lf = fit_line(lx, ly);
  RateFit r;
  r.model = model;
  r.exponent = lf.slope;
  r.prefactor = std::exp(lf.intercept);
  r.rms_residual = lf.rms;
  r.std_error = lf.slope_error;
  r.samples = lx.size();
  const boost::math::students_t dist(double(lx.size() - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  r.ci_low = r.exponent - tq * r.std_error;
  r.ci_high = r.exponent + tq * r.std_error;
  return r;
}

}  // namespace qg
