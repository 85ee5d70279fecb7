#include "qg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qg/errors.hpp"
#include "qg/fft.hpp"

namespace qg {
namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

std::vector<Complex> spectral_copy(const Field& f) {
  const Field s = to_spectral(f);
  return {s.spectral().begin(), s.spectral().end()};
}

std::vector<double> physical_copy(const Field& f) {
  const Field p = to_physical(f);
  return {p.physical().begin(), p.physical().end()};
}

// Sign (-1)^{m1+m2} relating the corner-origin DFT to transforms about x = 0.
double centering_sign(const GridSpec& grid, int row, int col) {
  return ((grid.mode_index(row) + col) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Field apply_multiplier(const Field& f, const std::function<Complex(double, double)>& symbol,
                       bool odd) {
  std::vector<Complex> c = spectral_copy(f);
  const GridSpec& g = f.grid();
  const int cols = g.spectral_cols();
  for_each_mode(g, [&](int i, int j, double k1, double k2) {
    Complex& v = c[std::size_t(i) * cols + j];
    if (odd && is_nyquist(g, i, j)) {
      v = 0.0;
    } else {
      v *= symbol(k1, k2);
    }
  });
  return to_physical(Field::from_spectral(g, std::move(c)));
}

Field fractional_laplacian(const Field& f, double s, MeanPolicy policy) {
  if (s < 0.0 && policy == MeanPolicy::reject) {
    const double m = std::abs(mean(f));
    if (m > 1e-13 * max_abs(f)) {
      throw InvalidArgument("fractional_laplacian: negative power on a field with nonzero mean");
    }
  }
  return apply_multiplier(f, [s](double k1, double k2) -> Complex {
    if (s == 0.0) return 1.0;
    const double k = std::hypot(k1, k2);
    if (k == 0.0) return 0.0;
    return std::pow(k, s);
  });
}

Field riesz_transform(const Field& f, int j) {
  if (j != 1 && j != 2) throw InvalidArgument("riesz_transform: component must be 1 or 2");
  return apply_multiplier(
      f,
      [j](double k1, double k2) -> Complex {
        const double k = std::hypot(k1, k2);
        if (k == 0.0) return 0.0;
        return Complex(0.0, (j == 1 ? k1 : k2) / k);
      },
      true);
}

VectorField riesz_velocity(const Field& theta) {
  // u = (-d2 psi, d1 psi), psi_hat = theta_hat / |xi|
  Field u1 = apply_multiplier(
      theta,
      [](double k1, double k2) -> Complex {
        const double k = std::hypot(k1, k2);
        return k == 0.0 ? Complex{} : Complex(0.0, -k2 / k);
      },
      true);
  Field u2 = apply_multiplier(
      theta,
      [](double k1, double k2) -> Complex {
        const double k = std::hypot(k1, k2);
        return k == 0.0 ? Complex{} : Complex(0.0, k1 / k);
      },
      true);
  return {std::move(u1), std::move(u2)};
}

VectorField gradient(const Field& f) {
  return {apply_multiplier(f, [](double k1, double) { return Complex(0.0, k1); }, true),
          apply_multiplier(f, [](double, double k2) { return Complex(0.0, k2); }, true)};
}

VectorField perp_gradient(const Field& f) {
  return {apply_multiplier(f, [](double, double k2) { return Complex(0.0, -k2); }, true),
          apply_multiplier(f, [](double k1, double) { return Complex(0.0, k1); }, true)};
}

Field divergence(const VectorField& v) {
  require_same_grid(v.x1, v.x2);
  const GridSpec& g = v.x1.grid();
  const std::vector<Complex> a = spectral_copy(v.x1);
  const std::vector<Complex> b = spectral_copy(v.x2);
  std::vector<Complex> c(g.spectral_size());
  const int cols = g.spectral_cols();
  for_each_mode(g, [&](int i, int j, double k1, double k2) {
    const std::size_t idx = std::size_t(i) * cols + j;
    c[idx] = is_nyquist(g, i, j) ? Complex{} : Complex(0.0, k1) * a[idx] + Complex(0.0, k2) * b[idx];
  });
  return to_physical(Field::from_spectral(g, std::move(c)));
}

bool dealias_keeps(const GridSpec& grid, int row, int col) noexcept {
  const int m1 = std::abs(grid.mode_index(row));
  // keep iff max(|m1|,|m2|) <= n/3, i.e. 3*max <= n
  return 3 * std::max(m1, col) <= grid.n();
}

Field dealias(const Field& f) {
  std::vector<Complex> c = spectral_copy(f);
  const GridSpec& g = f.grid();
  const int cols = g.spectral_cols();
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!dealias_keeps(g, i, j)) c[std::size_t(i) * cols + j] = 0.0;
    }
  }
  return to_physical(Field::from_spectral(g, std::move(c)));
}

Field add(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<double> x = physical_copy(a);
  const Field pb = to_physical(b);
  auto y = pb.physical();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  return Field::from_physical(a.grid(), std::move(x));
}

Field subtract(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<double> x = physical_copy(a);
  const Field pb = to_physical(b);
  auto y = pb.physical();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
  return Field::from_physical(a.grid(), std::move(x));
}

Field scale(const Field& a, double c) {
  std::vector<double> x = physical_copy(a);
  for (double& v : x) v *= c;
  return Field::from_physical(a.grid(), std::move(x));
}

Field multiply(const Field& a, const Field& b) {
  require_same_grid(a, b);
  std::vector<double> x = physical_copy(a);
  const Field pb = to_physical(b);
  auto y = pb.physical();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= y[i];
  return Field::from_physical(a.grid(), std::move(x));
}

Field map_values(const Field& a, const std::function<double(double)>& fn) {
  std::vector<double> x = physical_copy(a);
  for (double& v : x) v = fn(v);
  return Field::from_physical(a.grid(), std::move(x));
}

double mass(const Field& f) {
  if (f.has_spectral()) return f.grid().cell_area() * f.spectral()[0].real();
  double s = 0.0;
  for (double v : f.physical()) s += v;
  return f.grid().cell_area() * s;
}

double mean(const Field& f) {
  return mass(f) / (f.grid().box_length() * f.grid().box_length());
}

double max_abs(const Field& f) {
  const Field p = to_physical(f);
  double m = 0.0;
  for (double v : p.physical()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const Field& f) {
  const Field p = to_physical(f);
  double m = std::numeric_limits<double>::infinity();
  for (double v : p.physical()) m = std::min(m, v);
  return m;
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) return max_abs(f);
  if (!(p > 0.0)) throw InvalidArgument("lp_norm: p must be positive");
  const Field q = to_physical(f);
  double s = 0.0;
  if (p == 2.0) {
    for (double v : q.physical()) s += v * v;
  } else if (p == 1.0) {
    for (double v : q.physical()) s += std::abs(v);
  } else {
    for (double v : q.physical()) s += std::pow(std::abs(v), p);
  }
  return std::pow(f.grid().cell_area() * s, 1.0 / p);
}

double spectral_l2_norm(const Field& f) {
  const Field s = to_spectral(f);
  const GridSpec& g = f.grid();
  const int cols = g.spectral_cols();
  const auto c = s.spectral();
  double sum = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = 0; j < cols; ++j) {
      // columns 0 and n/2 are their own conjugate mirror; others count twice
      const double w = (j == 0 || j == g.n() / 2) ? 1.0 : 2.0;
      sum += w * std::norm(c[std::size_t(i) * cols + j]);
    }
  }
  const double n2 = double(g.physical_size());
  return std::sqrt(g.cell_area() * sum / n2);
}

double spectral_max_abs(const Field& f) {
  const Field s = to_spectral(f);
  double m = 0.0;
  for (const Complex& v : s.spectral()) m = std::max(m, std::abs(v));
  return m;
}

Field sample(const GridSpec& grid, const std::function<double(double, double)>& fn) {
  const int n = grid.n();
  std::vector<double> v(grid.physical_size());
  for (int i = 0; i < n; ++i) {
    const double x1 = grid.coordinate(i);
    for (int j = 0; j < n; ++j) v[std::size_t(i) * n + j] = fn(x1, grid.coordinate(j));
  }
  return Field::from_physical(grid, std::move(v));
}

Field fold_synthesize(const GridSpec& grid, const std::function<Complex(double, double)>& transform,
                      double cutoff, int max_folds) {
  // The phase of each alias at the sample points is exactly one for even n.
  const double big_k = grid.n() * grid.fundamental();
  const int folds = std::max(1, int(std::ceil(cutoff / big_k + 0.5)));
  if (folds > max_folds) {
    throw ResolutionError("point-sample synthesis needs " + std::to_string(folds) +
                          " alias folds; refine the grid or use band-limited synthesis");
  }
  const double inv_area = 1.0 / grid.cell_area();
  std::vector<Complex> c(grid.spectral_size());
  for_each_mode(grid, [&](int row, int col, double k1, double k2) {
    Complex acc = 0.0;
    for (int p1 = -folds; p1 <= folds; ++p1) {
      const double q1 = k1 + big_k * p1;
      if (std::abs(q1) > cutoff + big_k) continue;
      for (int p2 = -folds; p2 <= folds; ++p2) {
        const double q2 = k2 + big_k * p2;
        if (std::hypot(q1, q2) > cutoff + big_k) continue;
        acc += transform(q1, q2);
      }
    }
    const double sign = centering_sign(grid, row, col);
    c[std::size_t(row) * grid.spectral_cols() + col] = sign * inv_area * acc;
  });
  return to_physical(Field::from_spectral(grid, std::move(c)));
}

Field synthesize(const GridSpec& grid, const std::function<Complex(double, double)>& transform) {
  const int cols = grid.spectral_cols();
  const double inv_area = 1.0 / grid.cell_area();
  const double knyq = grid.fundamental() * (grid.n() / 2);
  std::vector<Complex> c(grid.spectral_size());
  for_each_mode(grid, [&](int i, int j, double k1, double k2) {
    Complex v;
    const bool row_nyq = (i == grid.n() / 2);
    const bool col_nyq = (j == grid.n() / 2);
    if (!row_nyq && !col_nyq) {
      v = transform(k1, k2);
    } else {
      // average over the aliased sign choices so the result stays Hermitian
      const double a1 = row_nyq ? knyq : k1;
      const double a2 = col_nyq ? knyq : k2;
      int count = 0;
      for (double s1 : {1.0, -1.0}) {
        if (!row_nyq && s1 < 0) continue;
        for (double s2 : {1.0, -1.0}) {
          if (!col_nyq && s2 < 0) continue;
          v += transform(s1 * a1, s2 * a2);
          ++count;
        }
      }
      v /= double(count);
    }
    c[std::size_t(i) * cols + j] = centering_sign(grid, i, j) * inv_area * v;
  });
  return to_physical(Field::from_spectral(grid, std::move(c)));
}

Complex continuous_transform_at(const Field& f, int row, int col) {
  const Field s = to_spectral(f);
  const GridSpec& g = f.grid();
  return g.cell_area() * centering_sign(g, row, col) *
         s.spectral()[std::size_t(row) * g.spectral_cols() + col];
}

}  // namespace qg
