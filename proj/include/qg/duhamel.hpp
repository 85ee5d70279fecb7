#pragma once

#include <vector>

#include "qg/solver.hpp"

namespace qg {

/// Per-mode product integration of I(s) = int_0^s exp(-lambda (s - tau)) F(tau) dtau
/// for forcing known at nodes s_0 = 0 < s_1 < ... (lambda = |xi|^alpha).
///
/// On each panel F is replaced by the Lagrange polynomial through `n_quad`
/// neighbouring nodes and integrated against the exponential exactly, so the
/// stiff factor needs no mesh grading.
class ProductIntegrator {
 public:
  ProductIntegrator(double alpha, const GridSpec& grid, std::vector<double> nodes, int n_quad);

  /// forcing[j] is the half spectrum at nodes[j]; returns I at every node.
  std::vector<std::vector<Complex>> integrate(
      const std::vector<std::vector<Complex>>& forcing) const;

 private:
  GridSpec grid_;
  std::vector<double> nodes_;
  int n_quad_;
  std::vector<double> lambda_;
};

/// exp(-lambda s) theta_0_hat for every mode.
std::vector<Complex> linear_propagate(const std::vector<Complex>& theta0_hat, double alpha,
                                      const GridSpec& grid, double s);

struct DuhamelReport {
  std::vector<double> times;
  std::vector<double> residuals;  ///< relative L2 residual at each sample after t = 0
  double max_residual = 0.0;
};

/// Compares every sample of a (single-box) trajectory with the mild-solution
/// right side built from the trajectory's own nonlinear forcing.
/// Throws InvalidArgument if the trajectory spans a box rescale or has fewer
/// than n_quad + 1 samples.
DuhamelReport duhamel_check(const Trajectory& trajectory, int n_quad = 4);

/// max over sample times of ||theta - Duhamel right side||_2 / ||theta||_2.
double duhamel_residual(const Trajectory& trajectory, int n_quad = 4);

/// Iterates 0..k of theta^{(j+1)}(s) = G(s) * theta_0 + int_0^s G(s - tau) * N(theta^{(j)}(tau)) dtau
/// on a uniform grid of `panels` time panels; returns each iterate at time t.
/// Throws NumericalError when successive differences stop contracting.
std::vector<Field> picard_sequence(const Field& theta0, double alpha, double t, int k,
                                   int panels = 64, int n_quad = 4);

/// k-th Picard iterate at time t (k <= 4).
Field picard_iterate(const Field& theta0, double alpha, double t, int k, int panels = 64,
                     int n_quad = 4);

}  // namespace qg
