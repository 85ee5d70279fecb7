#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qg/field.hpp"

namespace qg {

/// Random mean-zero trigonometric polynomials on the 2 pi torus:
///   f(x) = sum_{0 < |m|_inf <= band} a_m exp(i m.x),  a_{-m} = conj(a_m),
/// with a_m complex Gaussian of standard deviation |m|^{-decay}. The
/// coefficients depend only on (seed, member), never on the grid, so the same
/// member can be sampled at several resolutions.
struct SpectrumLaw {
  int band = 8;
  double decay = 1.0;
};

class FieldEnsemble {
 public:
  FieldEnsemble(std::uint64_t seed, int count, SpectrumLaw law = {});

  std::uint64_t seed() const noexcept { return seed_; }
  int count() const noexcept { return count_; }
  const SpectrumLaw& law() const noexcept { return law_; }

  /// Member i on an n x n grid of the 2 pi box, normalized to unit L2 norm.
  /// Throws ResolutionError unless band < n/3.
  Field member(int i, int n) const;

  /// fn(i) for i in [0, count), spread over `jobs` threads; results are
  /// returned in member order so reductions are deterministic.
  std::vector<double> map(const std::function<double(int)>& fn, int jobs = 1) const;

 private:
  std::uint64_t seed_;
  int count_;
  SpectrumLaw law_;
};

/// Runs fn(i) for i in [0, count) on `jobs` threads. The first exception
/// thrown by any call is rethrown after all threads join.
void parallel_for(int count, const std::function<void(int)>& fn, int jobs);

/// parallel_for collecting fn(i) in index order.
std::vector<double> parallel_indexed(int count, const std::function<double(int)>& fn, int jobs);

}  // namespace qg
