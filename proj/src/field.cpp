#include "qg/field.hpp"

#include "qg/errors.hpp"
#include "qg/fft.hpp"

namespace qg {

Field Field::from_physical(const GridSpec& grid, std::vector<double> values) {
  if (values.size() != grid.physical_size()) {
    throw InvalidArgument("field: physical array has wrong size");
  }
  Field f(grid);
  f.phys_ = std::move(values);
  f.has_phys_ = true;
  return f;
}

Field Field::from_spectral(const GridSpec& grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != grid.spectral_size()) {
    throw InvalidArgument("field: spectral array has wrong size");
  }
  Field f(grid);
  f.spec_ = std::move(coeffs);
  f.has_spec_ = true;
  return f;
}

Field Field::from_both(const GridSpec& grid, std::vector<double> values,
                       std::vector<Complex> coeffs) {
  Field f = from_physical(grid, std::move(values));
  if (coeffs.size() != grid.spectral_size()) {
    throw InvalidArgument("field: spectral array has wrong size");
  }
  f.spec_ = std::move(coeffs);
  f.has_spec_ = true;
  return f;
}

Field Field::zeros(const GridSpec& grid) {
  return from_both(grid, std::vector<double>(grid.physical_size(), 0.0),
                   std::vector<Complex>(grid.spectral_size(), Complex{}));
}

std::span<const double> Field::physical() const {
  if (!has_phys_) throw InvalidArgument("field: physical representation not present");
  return phys_;
}

std::span<const Complex> Field::spectral() const {
  if (!has_spec_) throw InvalidArgument("field: spectral representation not present");
  return spec_;
}

Field to_spectral(const Field& f) {
  if (f.has_spectral()) return f;
  std::vector<Complex> coeffs(f.grid().spectral_size());
  forward_fft(f.grid(), f.physical(), coeffs);
  std::vector<double> values(f.physical().begin(), f.physical().end());
  return Field::from_both(f.grid(), std::move(values), std::move(coeffs));
}

Field to_physical(const Field& f) {
  if (f.has_physical()) return f;
  std::vector<double> values(f.grid().physical_size());
  inverse_fft(f.grid(), f.spectral(), values);
  std::vector<Complex> coeffs(f.spectral().begin(), f.spectral().end());
  return Field::from_both(f.grid(), std::move(values), std::move(coeffs));
}

}  // namespace qg
