#pragma once

#include <cmath>
#include <numbers>

namespace qg {

/// Periodic square grid standing in for the plane.
///
/// Physical samples sit at x = -L/2 + i*h, i = 0..n-1, so index (0,0) is the
/// corner (-L/2, -L/2) and the origin is index (n/2, n/2). Physical arrays are
/// row-major with the first index along x1. Spectral arrays use the real-to-
/// complex half layout: n rows (k1, symmetric wraparound) by n/2+1 columns (k2 >= 0).
class GridSpec {
 public:
  /// Throws InvalidArgument unless n is a power of two >= 32 and L > 0.
  GridSpec(int n, double box_length);

  int n() const noexcept { return n_; }
  double box_length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  double cell_area() const noexcept { return spacing() * spacing(); }

  int spectral_cols() const noexcept { return n_ / 2 + 1; }
  std::size_t physical_size() const noexcept { return std::size_t(n_) * n_; }
  std::size_t spectral_size() const noexcept { return std::size_t(n_) * spectral_cols(); }

  double coordinate(int i) const noexcept { return -0.5 * length_ + i * spacing(); }

  /// Signed integer mode number for row index i of the spectral layout.
  int mode_index(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  double fundamental() const noexcept { return 2.0 * std::numbers::pi / length_; }
  double wavenumber(int i) const noexcept { return fundamental() * mode_index(i); }

  /// Same n, box doubled.
  GridSpec doubled() const { return GridSpec(n_, 2.0 * length_); }

  bool operator==(const GridSpec& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  int n_;
  double length_;
};

}  // namespace qg
