#include "qg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qg/errors.hpp"
#include "qg/spectral.hpp"

namespace qg {
namespace {

constexpr double kPi = std::numbers::pi;

Complex ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// (i xi1)^b1 (i xi2)^b2 exp(-t |xi|^alpha)
Complex kernel_symbol(const KernelSpec& s, double k1, double k2) {
  const double rho = std::hypot(k1, k2);
  const double decay = std::exp(-s.t * std::pow(rho, s.alpha));
  if (s.order() == 0) return {decay, 0.0};
  return ipow(s.order()) * std::pow(k1, s.beta1) * std::pow(k2, s.beta2) * decay;
}

struct LineFit {
  double slope;
  double intercept;
  double rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f{sxy / sxx, 0.0, 0.0};
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / m);
  return f;
}

// Integral over the plane outside the square [-w, w]^2 of r^{-p}, p > 2.
double outside_square(double p, double w) {
  const auto f = [&](double th) { return std::pow(w / std::cos(th), 2.0 - p); };
  return 8.0 / (p - 2.0) * gauss_legendre16(f, 0.0, 0.25 * kPi);
}

void require_radial(const KernelSpec& spec, const char* who) {
  if (spec.order() != 0) throw InvalidArgument(std::string(who) + ": needs beta = 0");
}

}  // namespace

KernelSpec::KernelSpec(double alpha_, double t_, int beta1_, int beta2_)
    : alpha(alpha_), t(t_), beta1(beta1_), beta2(beta2_) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("kernel: alpha must lie in (0, 2]");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("kernel: t must be positive");
  if (beta1 < 0 || beta2 < 0) throw InvalidArgument("kernel: beta must be nonnegative");
  if (beta1 + beta2 > 3) throw InvalidArgument("kernel: |beta| must be at most 3");
}

double KernelSpec::length_scale() const { return std::pow(t, 1.0 / alpha); }

void check_resolution(const KernelSpec& spec, const GridSpec& grid) {
  const double ell = spec.length_scale();
  const double slack = 1.0 + 1e-12;
  if (ell * slack < 4.0 * grid.spacing()) {
    throw ResolutionError("kernel under-resolved: t^{1/alpha} = " + std::to_string(ell) +
                          " < 4h = " + std::to_string(4.0 * grid.spacing()));
  }
  if (grid.box_length() * slack < 16.0 * ell) {
    throw ResolutionError("kernel truncated: L = " + std::to_string(grid.box_length()) +
                          " < 16 t^{1/alpha} = " + std::to_string(16.0 * ell));
  }
}

Field kernel_on_grid(const KernelSpec& spec, const GridSpec& grid, KernelSynthesis mode) {
  check_resolution(spec, grid);
  if (mode == KernelSynthesis::band_limited) {
    return to_physical(synthesize(grid, [&](double k1, double k2) {
      return kernel_symbol(spec, k1, k2);
    }));
  }

  const double cutoff = std::pow(36.0 / spec.t, 1.0 / spec.alpha);  // exp(-36) beyond
  return fold_synthesize(grid, [&](double k1, double k2) { return kernel_symbol(spec, k1, k2); },
                         cutoff);
}

double kernel_peak(double alpha, double t) {
  return std::tgamma(2.0 / alpha) / (2.0 * kPi * alpha * std::pow(t, 2.0 / alpha));
}

double gaussian_kernel(double t, double r) {
  return std::exp(-r * r / (4.0 * t)) / (4.0 * kPi * t);
}

double poisson_kernel(double t, double r) {
  return t / (2.0 * kPi * std::pow(t * t + r * r, 1.5));
}

double poisson_kernel_derivative(double t, double r) {
  return -3.0 * t * r / (2.0 * kPi * std::pow(t * t + r * r, 2.5));
}

// Both radial formulas come from integrating the J0 / J1 inversion by parts,
// which trades the growing rho factor for a derivative of exp(-t rho^alpha).
double kernel_radial(const KernelSpec& spec, double r, const HankelOptions& options) {
  require_radial(spec, "kernel_radial");
  if (r < 0.0) throw InvalidArgument("kernel_radial: r must be nonnegative");
  if (r == 0.0) return kernel_peak(spec.alpha, spec.t);
  const double a = spec.alpha, t = spec.t;
  const double factor = a * t / (2.0 * kPi * r);
  HankelOptions opt = options;
  opt.abs_tol = options.abs_tol / factor;
  const auto g = [&](double rho) { return std::pow(rho, a) * std::exp(-t * std::pow(rho, a)); };
  return factor * hankel_integral(g, 1, r, opt).value;
}

double kernel_radial_derivative(const KernelSpec& spec, double r, const HankelOptions& options) {
  require_radial(spec, "kernel_radial_derivative");
  if (r < 0.0) throw InvalidArgument("kernel_radial_derivative: r must be nonnegative");
  if (r == 0.0) return 0.0;
  const double a = spec.alpha, t = spec.t;
  const double factor = -a * t / (2.0 * kPi * r);
  HankelOptions opt = options;
  opt.abs_tol = options.abs_tol / std::abs(factor);
  const auto g = [&](double rho) {
    return std::pow(rho, 1.0 + a) * std::exp(-t * std::pow(rho, a));
  };
  return factor * hankel_integral(g, 2, r, opt).value;
}

FarFieldExpansion far_field_expansion(double alpha, double t, int max_terms) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw InvalidArgument("far field: alpha in (0, 2]");
  FarFieldExpansion e;
  for (int k = 1; k <= max_terms; ++k) {
    const double s = std::sin(0.5 * kPi * alpha * k);
    // sin vanishes identically for even k at alpha = 1, and for all k at alpha = 2
    if (std::abs(s) < 1e-14) continue;
    const double lg = 2.0 * std::lgamma(1.0 + 0.5 * alpha * k) - std::lgamma(k + 1.0) +
                      alpha * k * std::log(2.0) + k * std::log(t);
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    e.coeff.push_back(sign * s * std::exp(lg) / (kPi * kPi));
    e.power.push_back(2.0 + alpha * k);
  }
  return e;
}

double FarFieldExpansion::evaluate(double r, double rel_tol) const {
  if (coeff.empty()) return 0.0;  // alpha = 2: no algebraic tail
  double sum = 0.0;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    const double term = coeff[k] * std::pow(r, -power[k]);
    if (std::abs(term) > last && k > 1) break;  // asymptotic: stop at the smallest term
    sum += term;
    last = std::abs(term);
    if (last <= 1e-17 * std::abs(sum)) return sum;
  }
  if (last > rel_tol * std::abs(sum)) {
    throw ConvergenceError("far-field series not converged at r = " + std::to_string(r),
                           last / std::abs(sum));
  }
  return sum;
}

double periodize(const std::function<double(double)>& radial, const FarFieldExpansion& tail,
                 double box_length, double x1, double x2, int images) {
  const double L = box_length;
  double sum = 0.0;
  for (int k1 = -images; k1 <= images; ++k1) {
    for (int k2 = -images; k2 <= images; ++k2) {
      const double r = std::hypot(x1 + L * k1, x2 + L * k2);
      const bool near = std::abs(k1) <= 1 && std::abs(k2) <= 1;
      sum += near ? radial(r) : tail.evaluate(r);
    }
  }
  // Remaining images as an integral, corrected for the cell-midpoint rule.
  const double w = (images + 0.5) * L;
  double rest = 0.0;
  for (std::size_t k = 0; k < tail.coeff.size(); ++k) {
    const double p = tail.power[k];
    const double term = tail.coeff[k] * (outside_square(p, w) / (L * L) -
                                         p * p / 24.0 * outside_square(p + 2.0, w));
    rest += term;
    if (std::abs(term) < 1e-18 * std::abs(rest)) break;
  }
  return sum + rest;
}

double scaling_check(double alpha, double t, std::span<const double> radii, KernelRoute route) {
  const KernelSpec at_t(alpha, t);
  const KernelSpec unit(alpha, 1.0);
  std::function<double(const KernelSpec&, double)> g;
  if (route == KernelRoute::closed_form) {
    if (alpha == 1.0) {
      g = [](const KernelSpec& s, double r) { return poisson_kernel(s.t, r); };
    } else if (alpha == 2.0) {
      g = [](const KernelSpec& s, double r) { return gaussian_kernel(s.t, r); };
    } else {
      throw InvalidArgument("scaling_check: closed form only exists for alpha in {1, 2}");
    }
  } else {
    g = [](const KernelSpec& s, double r) { return kernel_radial(s, r); };
  }
  const double peak = g(at_t, 0.0);
  const double ell = at_t.length_scale();
  const double pre = std::pow(t, -2.0 / alpha);
  double worst = 0.0;
  for (double r : radii) {
    const double direct = g(at_t, r);
    const double scaled = pre * g(unit, r / ell);
    worst = std::max(worst, std::abs(direct - scaled) / peak);
  }
  return worst;
}

KernelComparison compare_kernel(const KernelSpec& spec, const GridSpec& grid, KernelRoute route,
                                int stride) {
  if (spec.order() != 0) throw InvalidArgument("compare_kernel: needs beta = 0");
  if (stride < 1) throw InvalidArgument("compare_kernel: stride must be positive");
  std::function<double(double)> radial;
  FarFieldExpansion tail;
  int images = 32;
  if (route == KernelRoute::closed_form) {
    if (spec.alpha == 1.0) {
      radial = [t = spec.t](double r) { return poisson_kernel(t, r); };
      tail = far_field_expansion(1.0, spec.t);
    } else if (spec.alpha == 2.0) {
      radial = [t = spec.t](double r) { return gaussian_kernel(t, r); };
      images = 2;
    } else {
      throw InvalidArgument("compare_kernel: closed form only exists for alpha in {1, 2}");
    }
  } else {
    radial = [spec](double r) { return kernel_radial(spec, r); };
    tail = far_field_expansion(spec.alpha, spec.t);
  }
  const Field k = kernel_on_grid(spec, grid);
  KernelComparison out;
  out.mass_defect = mass(k) - 1.0;
  out.min_ratio = min_value(k) / max_abs(k);
  const int c = grid.n() / 2;
  const double quarter = 0.25 * grid.box_length();
  for (auto [a, b] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 1}}) {
    for (int d = 0;; d += stride) {
      const int i = c + a * d, j = c + b * d;
      const double x1 = grid.coordinate(i), x2 = grid.coordinate(j);
      if (std::hypot(x1, x2) > quarter) break;
      if (d == 0 && b != 0) continue;  // origin once
      const double ref = periodize(radial, tail, grid.box_length(), x1, x2, images);
      const double val = k.at(i, j);
      out.x1.push_back(x1);
      out.x2.push_back(x2);
      out.grid_value.push_back(val);
      out.reference.push_back(ref);
      out.max_relative_error = std::max(out.max_relative_error, std::abs(val / ref - 1.0));
    }
  }
  return out;
}

TailFit tail_exponent(const KernelSpec& spec, double r_max, int samples) {
  if (spec.order() > 1) throw InvalidArgument("tail_exponent: supports |beta| <= 1");
  if (spec.alpha >= 2.0) {
    throw InvalidArgument("tail_exponent: the Gaussian kernel has no algebraic tail");
  }
  if (samples < 4) throw InvalidArgument("tail_exponent: need at least 4 samples");
  const double ell = spec.length_scale();
  TailFit fit;
  fit.r_min = 8.0 * ell;
  fit.r_max = r_max > 0.0 ? r_max : 4096.0 * ell;
  if (fit.r_max < 10.0 * fit.r_min) {
    throw InsufficientSpan("tail_exponent: fit window spans less than one decade");
  }
  fit.expected = -(2.0 + spec.alpha + spec.order());
  const KernelSpec base(spec.alpha, spec.t);
  std::vector<double> lx, ly;
  for (int i = 0; i < samples; ++i) {
    const double r = fit.r_min * std::pow(fit.r_max / fit.r_min, double(i) / (samples - 1));
    const double v = spec.order() == 0 ? kernel_radial(base, r)
                                       : kernel_radial_derivative(base, r);
    fit.radii.push_back(r);
    fit.values.push_back(v);
    if (v == 0.0) throw NumericalError("tail_exponent: kernel vanished at r = " + std::to_string(r));
    lx.push_back(std::log(r));
    ly.push_back(std::log(std::abs(v)));
  }
  const LineFit lf = least_squares(lx, ly);
  fit.slope = lf.slope;
  fit.rms_residual = lf.rms;
  return fit;
}

WeightedNormResult kernel_weighted_norm(const KernelSpec& spec, double mu, double p, double R) {
  require_radial(spec, "kernel_weighted_norm");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("kernel_weighted_norm: p in [1, inf)");
  if (!(R > 0.0)) throw InvalidArgument("kernel_weighted_norm: R must be positive");
  const double ell = spec.length_scale();
  const auto integrand = [&](double r) {
    const double g = std::abs(kernel_radial(spec, r));
    return 2.0 * kPi * r * std::pow(std::pow(r, mu) * g, p);
  };

  WeightedNormResult out;
  // Panels: [0, ell] in four pieces, then octaves subdivided in two.
  double acc = 0.0;
  const double first = std::min(ell, R);
  for (int i = 0; i < 4; ++i) acc += gauss_legendre16(integrand, first * i / 4, first * (i + 1) / 4);
  double lo = first;
  while (lo < R) {
    const double hi = std::min(2.0 * lo, R);
    const double mid = 0.5 * (lo + hi);
    acc += gauss_legendre16(integrand, lo, mid) + gauss_legendre16(integrand, mid, hi);
    lo = hi;
    out.radii.push_back(hi);
    out.values.push_back(std::pow(acc, 1.0 / p));
  }
  out.value = std::pow(acc, 1.0 / p);

  // Integrand of value^p behaves like r^{e-1} far out.
  const double e = p * mu - p * (2.0 + spec.alpha) + 2.0;
  std::vector<double> lx, ly;
  if (spec.alpha < 2.0 && std::abs(e) < 1e-12) {
    out.growth_model = "log-power";
    // value^p grows like log R: fit the increment past 8 ell against log(R / R0).
    std::size_t i0 = 0;
    while (i0 < out.radii.size() && out.radii[i0] < 8.0 * ell) ++i0;
    if (i0 + 3 < out.radii.size()) {
      const double r0 = out.radii[i0];
      const double v0 = std::pow(out.values[i0], p);
      for (std::size_t i = i0 + 2; i < out.radii.size(); ++i) {
        lx.push_back(std::log(std::log(out.radii[i] / r0)));
        ly.push_back(std::log(std::pow(out.values[i], p) - v0));
      }
    }
  } else if (spec.alpha < 2.0 && e > 0.0) {
    out.growth_model = "power";
    for (std::size_t i = 0; i < out.radii.size(); ++i) {
      if (out.radii[i] < out.radii.back() / 100.0) continue;
      lx.push_back(std::log(out.radii[i]));
      ly.push_back(std::log(out.values[i]));
    }
  } else {
    out.growth_model = "bounded";
    for (std::size_t i = 0; i < out.radii.size(); ++i) {
      if (out.radii[i] < out.radii.back() / 100.0) continue;
      lx.push_back(std::log(out.radii[i]));
      ly.push_back(std::log(out.values[i]));
    }
  }
  out.growth_exponent = lx.size() >= 2 ? least_squares(lx, ly).slope : 0.0;
  return out;
}

void write_kernel_table_csv(std::ostream& out, std::span<const double> radii,
                            std::span<const double> values) {
  if (radii.size() != values.size()) throw InvalidArgument("kernel table: size mismatch");
  out << "r,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < radii.size(); ++i) out << radii[i] << ',' << values[i] << '\n';
}

}  // namespace qg
