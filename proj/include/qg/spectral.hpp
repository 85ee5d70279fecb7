#pragma once

#include <functional>

#include "qg/field.hpp"

namespace qg {

struct VectorField {
  Field x1;
  Field x2;
};

/// Mode visitor: (row, col, k1, k2). Row/col index the half-spectrum layout.
template <typename Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn) {
  const int n = grid.n();
  const int cols = grid.spectral_cols();
  const double k0 = grid.fundamental();
  for (int i = 0; i < n; ++i) {
    const double k1 = grid.wavenumber(i);
    for (int j = 0; j < cols; ++j) fn(i, j, k1, k0 * j);
  }
}

inline bool is_nyquist(const GridSpec& grid, int row, int col) noexcept {
  return row == grid.n() / 2 || col == grid.n() / 2;
}

/// Symbol m(k1, k2) applied to every mode. With `odd` set, the Nyquist row and
/// column are zeroed (an odd real-space operator has no real action there).
Field apply_multiplier(const Field& f, const std::function<Complex(double, double)>& symbol,
                       bool odd = false);

enum class MeanPolicy { reject, project };

/// Applies |xi|^s, so s = alpha gives (-Delta)^{alpha/2}.
///
/// s = 0 is the identity; otherwise the zero mode maps to 0. For s < 0 under
/// MeanPolicy::reject, a field whose mean exceeds 1e-13 * max|f| is refused
/// instead of silently projected.
Field fractional_laplacian(const Field& f, double s, MeanPolicy policy = MeanPolicy::reject);

/// R_j f = d_j (-Delta)^{-1/2} f, symbol i xi_j / |xi| (0 at xi = 0). j in {1, 2}.
Field riesz_transform(const Field& f, int j);

/// u = perp-gradient of psi with psi = (-Delta)^{-1/2} theta, i.e. (-R_2 theta, R_1 theta).
VectorField riesz_velocity(const Field& theta);

VectorField gradient(const Field& f);
/// (-d_2 f, d_1 f)
VectorField perp_gradient(const Field& f);
Field divergence(const VectorField& v);

/// 2/3 rule: zero modes with max(|m1|, |m2|) > n/3.
Field dealias(const Field& f);
bool dealias_keeps(const GridSpec& grid, int row, int col) noexcept;

// Pointwise algebra on physical values.
Field add(const Field& a, const Field& b);
Field subtract(const Field& a, const Field& b);
Field scale(const Field& a, double c);
Field multiply(const Field& a, const Field& b);
Field map_values(const Field& a, const std::function<double(double)>& fn);

/// Riemann sum h^2 * sum f.
double mass(const Field& f);
double mean(const Field& f);
double max_abs(const Field& f);
double min_value(const Field& f);
/// (h^2 sum |f|^p)^{1/p}; p = infinity gives the grid maximum.
double lp_norm(const Field& f, double p);
/// L2 norm computed from spectral coefficients (Parseval).
double spectral_l2_norm(const Field& f);
/// Largest coefficient magnitude over the full (Hermitian) spectrum.
double spectral_max_abs(const Field& f);

/// Samples fn(x1, x2) at the grid points.
Field sample(const GridSpec& grid, const std::function<double(double, double)>& fn);

/// Band-limited field whose continuous transform (convention F[f](xi) =
/// integral exp(-i x.xi) f(x) dx) is `transform` on the retained modes.
Field synthesize(const GridSpec& grid, const std::function<Complex(double, double)>& transform);

/// Point values of the periodization of the function whose continuous
/// transform is `transform`: every alias xi_m + K p (K = n * fundamental) with
/// |xi_m + K p| <= cutoff is folded onto mode m. Throws ResolutionError when
/// more than `max_folds` aliases per direction are needed.
Field fold_synthesize(const GridSpec& grid, const std::function<Complex(double, double)>& transform,
                      double cutoff, int max_folds = 128);

/// Continuous-transform estimate of each retained mode: h^2 (-1)^{m1+m2} c(m).
Complex continuous_transform_at(const Field& f, int row, int col);

}  // namespace qg
