#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qg/grid.hpp"

namespace qg {

using Complex = std::complex<double>;

/// Scalar field on a GridSpec, held in physical and/or spectral form.
///
/// Fields are immutable values: every operation returns a new Field. The
/// spectral coefficients are the unnormalized forward DFT of the physical
/// samples, c(m) = sum_j f(x_j) exp(-i xi_m . (x_j - x_0)).
class Field {
 public:
  static Field from_physical(const GridSpec& grid, std::vector<double> values);
  static Field from_spectral(const GridSpec& grid, std::vector<Complex> coeffs);
  static Field from_both(const GridSpec& grid, std::vector<double> values,
                         std::vector<Complex> coeffs);
  static Field zeros(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  bool has_physical() const noexcept { return has_phys_; }
  bool has_spectral() const noexcept { return has_spec_; }

  /// Throws InvalidArgument if the representation is absent.
  std::span<const double> physical() const;
  std::span<const Complex> spectral() const;

  double at(int i, int j) const { return physical()[std::size_t(i) * grid_.n() + j]; }

 private:
  Field(const GridSpec& grid) : grid_(grid) {}

  GridSpec grid_;
  std::vector<double> phys_;
  std::vector<Complex> spec_;
  bool has_phys_ = false;
  bool has_spec_ = false;
};

/// Populate the spectral representation (keeps the physical one).
Field to_spectral(const Field& f);
/// Populate the physical representation (keeps the spectral one).
Field to_physical(const Field& f);

}  // namespace qg
