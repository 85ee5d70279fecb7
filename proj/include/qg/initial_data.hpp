#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qg/field.hpp"

namespace qg {

/// weight * exp(-|x - c|^2 / width^2)
struct GaussianBump {
  double weight;
  double c1;
  double c2;
  double width;
};

/// Nonnegative Gaussian mixture with a closed-form transform.
struct InitialProfile {
  std::vector<GaussianBump> bumps;

  double value(double x1, double x2) const;
  /// Continuous transform (integral of exp(-i x.xi) f(x) dx).
  Complex transform(double k1, double k2) const;
  double mass() const;
  /// Largest radius |c| + width among the bumps.
  double extent() const;
};

enum class InitialFamily { radial_gaussian, shifted_gaussian, double_gaussian, bandlimited_bump };

/// Throws InvalidArgument for unknown names.
InitialFamily parse_initial_family(const std::string& name);
std::string to_string(InitialFamily family);

struct InitialDataParams {
  InitialFamily family = InitialFamily::radial_gaussian;
  double amplitude = 1e-2;
  double width = 1.5;
  double offset = 0.0;       ///< shifted_gaussian: centre (offset, 0); double_gaussian: (+-offset/2, 0)
  std::uint64_t seed = 0;    ///< bandlimited_bump
  int bump_count = 4;        ///< bandlimited_bump
};

/// Default amplitude: 1e-2 times the unit-time kernel peak G_alpha(1, 0).
double default_amplitude(double alpha);

InitialProfile make_profile(const InitialDataParams& params);

/// Samples the profile. Throws InvalidArgument if the profile is not
/// concentrated in |x| <= L/8 (values there must fall below 1e-14 * max).
Field make_initial_data(const InitialDataParams& params, const GridSpec& grid);
Field make_initial_data(const InitialProfile& profile, const GridSpec& grid);

}  // namespace qg
