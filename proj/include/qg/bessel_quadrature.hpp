#pragma once

#include <functional>
#include <vector>

namespace qg {

struct HankelOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-11;
  int min_panels = 12;
  int max_panels = 200000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Positive zero number k (k >= 1) of J_nu, nu in {0, 1, 2, ...}.
double bessel_zero(int nu, int k);

/// Best limit estimate of a sequence of partial sums by Wynn's epsilon algorithm.
double wynn_epsilon(const std::vector<double>& partial_sums);

/// Integral over (0, inf) of g(rho) J_nu(r rho) d rho for r > 0.
///
/// Integrates panel by panel between consecutive zeros of J_nu(r rho), with
/// geometric grading wherever a panel spans more than a factor of two in rho
/// (g may carry an integrable power-law singularity at 0). Partial sums are
/// accelerated with the epsilon algorithm. Throws ConvergenceError carrying
/// the achieved error estimate if the tolerance is not met within max_panels.
QuadratureResult hankel_integral(const std::function<double(double)>& g, int nu, double r,
                                 const HankelOptions& options = {});

/// Gauss-Legendre integral of f over [a, b] with 16 nodes.
double gauss_legendre16(const std::function<double(double)>& f, double a, double b);

}  // namespace qg
