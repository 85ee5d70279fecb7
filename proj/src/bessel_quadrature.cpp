#include "qg/bessel_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qg/errors.hpp"

namespace qg {
namespace {

constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
    0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
    0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double bessel_j(int nu, double x) { return std::cyl_bessel_j(double(nu), x); }

double bessel_j_prime(int nu, double x) {
  if (nu == 0) return -bessel_j(1, x);
  return bessel_j(nu - 1, x) - nu / x * bessel_j(nu, x);
}

// Integral over [a, b] of f, splitting geometrically when b/a > 2.
double graded_panel(const std::function<double(double)>& f, double a, double b) {
  double sum = 0.0;
  if (a <= 0.0) {
    // [b 2^-60, b] in halving steps; the remainder below is negligible for
    // integrable power-law behaviour at the origin.
    double hi = b;
    for (int k = 0; k < 60; ++k) {
      const double lo = 0.5 * hi;
      sum += gauss_legendre16(f, lo, hi);
      hi = lo;
    }
    sum += gauss_legendre16(f, 0.0, hi);
    return sum;
  }
  double lo = a;
  while (b / lo > 2.0) {
    sum += gauss_legendre16(f, lo, 2.0 * lo);
    lo *= 2.0;
  }
  return sum + gauss_legendre16(f, lo, b);
}

}  // namespace

double gauss_legendre16(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    const double d = half * kGlNodes[i];
    s += kGlWeights[i] * (f(mid - d) + f(mid + d));
  }
  return half * s;
}

double bessel_zero(int nu, int k) {
  if (nu < 0 || k < 1) throw InvalidArgument("bessel_zero: need nu >= 0 and k >= 1");
  // McMahon's expansion, then Newton polish.
  const double mu = 4.0 * nu * nu;
  const double beta = (k + 0.5 * nu - 0.25) * std::numbers::pi;
  double x = beta - (mu - 1.0) / (8.0 * beta) -
             4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * beta, 3));
  for (int it = 0; it < 50; ++it) {
    const double step = bessel_j(nu, x) / bessel_j_prime(nu, x);
    x -= step;
    if (std::abs(step) < 1e-15 * x) break;
  }
  return x;
}

double wynn_epsilon(const std::vector<double>& s) {
  const std::size_t m = s.size();
  if (m < 3) return m == 0 ? 0.0 : s.back();
  // Columns of the epsilon table; only the last two are needed.
  std::vector<double> older(m + 1, 0.0);
  std::vector<double> prev = s;
  double best = s.back();
  for (std::size_t k = 1; k < m; ++k) {
    std::vector<double> col(m - k);
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double diff = prev[i + 1] - prev[i];
      if (diff == 0.0 || !std::isfinite(diff)) return best;
      col[i] = older[i + 1] + 1.0 / diff;
    }
    if (k % 2 == 0) best = col.back();
    older = std::move(prev);
    prev = std::move(col);
  }
  return best;
}

QuadratureResult hankel_integral(const std::function<double(double)>& g, int nu, double r,
                                 const HankelOptions& options) {
  if (!(r > 0.0)) throw InvalidArgument("hankel_integral: r must be positive");
  const auto integrand = [&](double rho) { return g(rho) * bessel_j(nu, r * rho); };

  std::vector<double> partial;
  partial.reserve(64);
  double sum = 0.0;
  double left = 0.0;
  double prev_est = 0.0;
  int stable = 0;
  double err = std::numeric_limits<double>::infinity();
  int tiny_run = 0;
  constexpr std::size_t kWindow = 16;

  for (int k = 1; k <= options.max_panels; ++k) {
    const double right = bessel_zero(nu, k) / r;
    const double piece = graded_panel(integrand, left, right);
    sum += piece;
    left = right;
    partial.push_back(sum);
    if (partial.size() > kWindow) partial.erase(partial.begin());

    // Integrand has died out: the plain partial sum is the answer.
    if (std::abs(piece) <= 1e-17 * std::abs(sum)) {
      if (++tiny_run >= 3 && k >= options.min_panels) {
        return {sum, std::abs(piece), k};
      }
    } else {
      tiny_run = 0;
    }

    const double est = wynn_epsilon(partial);
    if (k >= options.min_panels) {
      err = std::abs(est - prev_est);
      const double tol = std::max(options.abs_tol, options.rel_tol * std::abs(est));
      if (err <= tol) {
        if (++stable >= 3) return {est, err, k};
      } else {
        stable = 0;
      }
    }
    prev_est = est;
  }
  throw ConvergenceError("hankel_integral: no convergence within panel budget", err);
}

}  // namespace qg
