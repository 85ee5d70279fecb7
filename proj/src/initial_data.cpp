#include "qg/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qg/errors.hpp"
#include "qg/kernel.hpp"
#include "qg/spectral.hpp"

namespace qg {
namespace {

// Uniform double in [lo, hi) from raw 64-bit draws, so the stream is the
// same on every standard library.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double InitialProfile::value(double x1, double x2) const {
  double v = 0.0;
  for (const auto& b : bumps) {
    const double d1 = x1 - b.c1, d2 = x2 - b.c2;
    v += b.weight * std::exp(-(d1 * d1 + d2 * d2) / (b.width * b.width));
  }
  return v;
}

Complex InitialProfile::transform(double k1, double k2) const {
  Complex v = 0.0;
  const double k2sum = k1 * k1 + k2 * k2;
  for (const auto& b : bumps) {
    const double w2 = b.width * b.width;
    if (0.25 * w2 * k2sum > 745.0) continue;  // exp underflows
    const double amp = b.weight * std::numbers::pi * w2 * std::exp(-0.25 * w2 * k2sum);
    v += amp * std::polar(1.0, -(k1 * b.c1 + k2 * b.c2));
  }
  return v;
}

double InitialProfile::mass() const {
  double m = 0.0;
  for (const auto& b : bumps) m += b.weight * std::numbers::pi * b.width * b.width;
  return m;
}

double InitialProfile::extent() const {
  double e = 0.0;
  for (const auto& b : bumps) e = std::max(e, std::hypot(b.c1, b.c2) + b.width);
  return e;
}

InitialFamily parse_initial_family(const std::string& name) {
  if (name == "radial_gaussian") return InitialFamily::radial_gaussian;
  if (name == "shifted_gaussian") return InitialFamily::shifted_gaussian;
  if (name == "double_gaussian") return InitialFamily::double_gaussian;
  if (name == "bandlimited_bump") return InitialFamily::bandlimited_bump;
  throw InvalidArgument("unknown initial-data family '" + name + "'");
}

std::string to_string(InitialFamily family) {
  switch (family) {
    case InitialFamily::radial_gaussian: return "radial_gaussian";
    case InitialFamily::shifted_gaussian: return "shifted_gaussian";
    case InitialFamily::double_gaussian: return "double_gaussian";
    case InitialFamily::bandlimited_bump: return "bandlimited_bump";
  }
  return "?";
}

double default_amplitude(double alpha) { return 1e-2 * kernel_peak(alpha, 1.0); }

InitialProfile make_profile(const InitialDataParams& p) {
  if (!(p.amplitude >= 0.0)) throw InvalidArgument("initial data: amplitude must be >= 0");
  if (!(p.width > 0.0)) throw InvalidArgument("initial data: width must be positive");
  InitialProfile prof;
  switch (p.family) {
    case InitialFamily::radial_gaussian:
      prof.bumps.push_back({p.amplitude, 0.0, 0.0, p.width});
      break;
    case InitialFamily::shifted_gaussian:
      prof.bumps.push_back({p.amplitude, p.offset, 0.0, p.width});
      break;
    case InitialFamily::double_gaussian:
      prof.bumps.push_back({p.amplitude, -0.5 * p.offset, 0.0, p.width});
      prof.bumps.push_back({p.amplitude, 0.5 * p.offset, 0.0, p.width});
      break;
    case InitialFamily::bandlimited_bump: {
      if (p.bump_count < 1) throw InvalidArgument("bandlimited_bump: need at least one bump");
      std::mt19937_64 rng(p.seed);
      double total = 0.0;
      for (int i = 0; i < p.bump_count; ++i) {
        const double r = uniform(rng, 0.0, 0.5 * p.width);
        const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double w = p.width * uniform(rng, 0.6, 1.0);
        const double a = uniform(rng, 0.5, 1.0);
        prof.bumps.push_back({a, r * std::cos(phi), r * std::sin(phi), w});
        total += a;
      }
      for (auto& b : prof.bumps) b.weight *= p.amplitude / total;
      break;
    }
  }
  return prof;
}

Field make_initial_data(const InitialProfile& profile, const GridSpec& grid) {
  Field f = sample(grid, [&](double x1, double x2) { return profile.value(x1, x2); });
  const auto v = f.physical();
  const double peak = *std::max_element(v.begin(), v.end());
  const double r_in = grid.box_length() / 8.0;
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::hypot(grid.coordinate(i), grid.coordinate(j)) <= r_in) continue;
      if (v[std::size_t(i) * n + j] > 1e-14 * peak) {
        throw InvalidArgument("initial data not concentrated in |x| <= L/8; enlarge the box");
      }
    }
  }
  return to_spectral(f);
}

Field make_initial_data(const InitialDataParams& params, const GridSpec& grid) {
  return make_initial_data(make_profile(params), grid);
}

}  // namespace qg
