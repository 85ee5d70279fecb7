#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qg/bessel_quadrature.hpp"
#include "qg/field.hpp"

namespace qg {

/// Identifies the fractional heat kernel G_alpha(t, .) and a derivative d^beta.
struct KernelSpec {
  KernelSpec(double alpha, double t, int beta1 = 0, int beta2 = 0);

  double alpha;
  double t;
  int beta1;
  int beta2;

  int order() const noexcept { return beta1 + beta2; }
  /// t^{1/alpha}, the kernel's spatial scale.
  double length_scale() const;
};

enum class KernelSynthesis {
  /// Aliased (folded) spectrum: exact point values of the periodic kernel.
  point_samples,
  /// Retained modes only: consistent with the discrete linear semigroup.
  band_limited,
};

/// Throws ResolutionError unless t^{1/alpha} >= 4h and L >= 16 t^{1/alpha}.
void check_resolution(const KernelSpec& spec, const GridSpec& grid);

/// d^beta G_alpha(t) on the grid, spectral symbol (i xi)^beta exp(-t |xi|^alpha).
/// Unit mass: the transform at xi = 0 is exactly one.
Field kernel_on_grid(const KernelSpec& spec, const GridSpec& grid,
                     KernelSynthesis mode = KernelSynthesis::point_samples);

/// G_alpha(t, 0) = Gamma(2/alpha) / (2 pi alpha t^{2/alpha}).
double kernel_peak(double alpha, double t);
/// (4 pi t)^{-1} exp(-r^2 / 4t)
double gaussian_kernel(double t, double r);
/// t / (2 pi (t^2 + r^2)^{3/2})
double poisson_kernel(double t, double r);
/// d/dr of the Poisson kernel.
double poisson_kernel_derivative(double t, double r);

/// Quadrature tolerances used by the radial routes. The absolute tolerance is
/// on the kernel value itself (not on the underlying oscillatory integral).
inline const HankelOptions kKernelQuadrature{1e-15, 1e-11, 12, 200000};

/// Free-space G_alpha(t, r) by Hankel quadrature of exp(-t rho^alpha).
/// Throws ConvergenceError (with the achieved estimate) on failure.
double kernel_radial(const KernelSpec& spec, double r,
                     const HankelOptions& options = kKernelQuadrature);
/// Radial derivative dG/dr, likewise by quadrature.
double kernel_radial_derivative(const KernelSpec& spec, double r,
                                const HankelOptions& options = kKernelQuadrature);

/// Large-|x| series  G_alpha(t, r) = sum_k a_k r^{-p_k},  p_k = 2 + alpha k.
/// Convergent for alpha < 1, convergent for r > t at alpha = 1, asymptotic otherwise.
struct FarFieldExpansion {
  std::vector<double> coeff;
  std::vector<double> power;

  /// Sums terms until they stop decreasing; throws ConvergenceError if the
  /// smallest term is still above `rel_tol` times the sum.
  double evaluate(double r, double rel_tol = 1e-13) const;
};

FarFieldExpansion far_field_expansion(double alpha, double t, int max_terms = 60);

/// Sum over lattice images x + L k of a radial free-space function, with the
/// images beyond |k|_inf > `images` replaced by the integral of `tail` over
/// the plane outside the summed square (plus the midpoint-rule correction).
double periodize(const std::function<double(double)>& radial, const FarFieldExpansion& tail,
                 double box_length, double x1, double x2, int images = 32);

enum class KernelRoute { closed_form, radial_quadrature };

/// max over radii of |G(t,r) - t^{-2/alpha} G(1, t^{-1/alpha} r)| / G(t, 0).
double scaling_check(double alpha, double t, std::span<const double> radii,
                     KernelRoute route = KernelRoute::radial_quadrature);

struct KernelComparison {
  std::vector<double> x1, x2, grid_value, reference;
  double max_relative_error = 0.0;  ///< pointwise, against the periodized reference
  double mass_defect = 0.0;         ///< Riemann-sum mass minus one
  double min_ratio = 0.0;           ///< min value / max value on the grid
};

/// Point-sample grid kernel against the periodized free-space kernel at grid
/// points on three rays (axis, diagonal, slope 1/2) with |x| <= L/4. The
/// closed-form route needs alpha in {1, 2}.
KernelComparison compare_kernel(const KernelSpec& spec, const GridSpec& grid, KernelRoute route,
                                int stride = 1);

struct TailFit {
  double slope = 0.0;
  double expected = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double rms_residual = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
};

/// Least-squares slope of log|d^beta G| against log r on [8 t^{1/alpha}, r_max].
/// Supports |beta| <= 1 (radial profile or its derivative along a coordinate axis).
TailFit tail_exponent(const KernelSpec& spec, double r_max = 0.0, int samples = 24);

struct WeightedNormResult {
  double value = 0.0;                 ///< windowed norm at the requested radius
  std::vector<double> radii;          ///< cumulative windows used for the growth fit
  std::vector<double> values;
  std::string growth_model;           ///< "power", "log-power" or "bounded"
  double growth_exponent = 0.0;
};

/// (int_{|x| <= R} (|x|^mu |G_alpha(t)|)^p dx)^{1/p} from the radial profile,
/// together with the growth fit in R.
WeightedNormResult kernel_weighted_norm(const KernelSpec& spec, double mu, double p, double R);

/// Writes "r,value" rows.
void write_kernel_table_csv(std::ostream& out, std::span<const double> radii,
                            std::span<const double> values);

}  // namespace qg
