#include <sstream>

#include "doctest.h"
#include "qg/errors.hpp"
#include "qg/kernel.hpp"
#include "qg/spectral.hpp"
#include "test_helpers.hpp"

using namespace qg;
using qgtest::kPi;

namespace {

double poisson(double t, double r) { return t / (2 * kPi * std::pow(t * t + r * r, 1.5)); }
double heat(double t, double r) { return std::exp(-r * r / (4 * t)) / (4 * kPi * t); }

// Value at grid index (i, j) of a field.
double value_at(const Field& f, double x1, double x2) {
  const auto& g = f.grid();
  const int i = int(std::lround((x1 + 0.5 * g.box_length()) / g.spacing()));
  const int j = int(std::lround((x2 + 0.5 * g.box_length()) / g.spacing()));
  return f.at(i, j);
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("peak values") {
    CHECK(kernel_peak(1.0, 1.0) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-14));
    CHECK(kernel_peak(2.0, 1.0) == doctest::Approx(1 / (4 * kPi)).epsilon(1e-14));
    // int_0^inf exp(-rho^a) rho drho = Gamma(2/a)/a
    for (double a : {0.5, 0.7, 1.5}) {
      CHECK(kernel_peak(a, 1.0) == doctest::Approx(std::tgamma(2 / a) / (2 * kPi * a)).epsilon(1e-13));
      CHECK(kernel_radial(KernelSpec(a, 1.0), 0.0) ==
            doctest::Approx(std::tgamma(2 / a) / (2 * kPi * a)).epsilon(1e-9));
    }
    CHECK(kernel_peak(1.0, 4.0) == doctest::Approx(1 / (2 * kPi * 16)).epsilon(1e-14));
  }

  TEST_CASE("closed forms") {
    CHECK(poisson_kernel(1.0, 1.0) == doctest::Approx(0.0562697697).epsilon(1e-9));
    CHECK(gaussian_kernel(1.0, 0.0) == doctest::Approx(1 / (4 * kPi)).epsilon(1e-15));
    // derivative by central difference
    const double h = 1e-5;
    for (double r : {0.3, 1.0, 4.0}) {
      const double fd = (poisson(2.0, r + h) - poisson(2.0, r - h)) / (2 * h);
      CHECK(poisson_kernel_derivative(2.0, r) == doctest::Approx(fd).epsilon(1e-8));
    }
  }

  TEST_CASE("radial quadrature matches closed forms") {
    for (double r : {0.0, 0.5, 1.0, 3.0, 10.0, 50.0}) {
      CHECK(kernel_radial(KernelSpec(1.0, 1.0), r) == doctest::Approx(poisson(1.0, r)).epsilon(1e-9));
      CHECK(kernel_radial_derivative(KernelSpec(1.0, 1.0), r) ==
            doctest::Approx(-3 * r / (2 * kPi * std::pow(1 + r * r, 2.5))).epsilon(1e-8).scale(1e-12));
    }
    for (double r : {0.0, 0.5, 1.0, 3.0, 6.0}) {
      CHECK(std::abs(kernel_radial(KernelSpec(2.0, 1.0), r) - heat(1.0, r)) < 1e-12);
    }
  }

  TEST_CASE("far field series") {
    const auto s = far_field_expansion(1.0, 1.0);
    for (double r : {2.0, 5.0, 20.0}) CHECK(s.evaluate(r) == doctest::Approx(poisson(1.0, r)).epsilon(1e-12));
    // alpha < 1: convergent; compare against the quadrature route
    const auto s05 = far_field_expansion(0.5, 1.0);
    for (double r : {20.0, 100.0}) {
      CHECK(s05.evaluate(r) == doctest::Approx(kernel_radial(KernelSpec(0.5, 1.0), r)).epsilon(1e-7));
    }
  }

  TEST_CASE("point samples against periodized closed forms") {
    for (double a : {1.0, 2.0}) {
      const auto cmp = compare_kernel(KernelSpec(a, 1.0), GridSpec(256, 16.0), KernelRoute::closed_form);
      CHECK(cmp.max_relative_error < 1e-6);
      CHECK(std::abs(cmp.mass_defect) < 1e-10);
      CHECK(cmp.min_ratio >= -1e-10);
    }
  }

  TEST_CASE("point samples against periodized quadrature") {
    const auto cmp = compare_kernel(KernelSpec(1.5, 1.0), GridSpec(256, 16.0), KernelRoute::radial_quadrature, 2);
    CHECK(cmp.max_relative_error < 1e-6);
    CHECK(std::abs(cmp.mass_defect) < 1e-10);
  }

  TEST_CASE("large box approaches free-space Poisson") {
    const Field G = kernel_on_grid(KernelSpec(1.0, 1.0), GridSpec(1024, 256.0));
    CHECK(value_at(G, 0, 0) == doctest::Approx(1 / (2 * kPi)).epsilon(1e-6));
    CHECK(value_at(G, 1.0, 0) == doctest::Approx(0.0562697697).epsilon(1e-6));
  }

  TEST_CASE("gaussian image sum by hand") {
    const GridSpec g(128, 16.0);
    const Field G = kernel_on_grid(KernelSpec(2.0, 1.0), g);
    for (double x : {0.0, 1.0, 3.0, 7.5}) {
      double ref = 0.0;
      for (int k1 = -2; k1 <= 2; ++k1) {
        for (int k2 = -2; k2 <= 2; ++k2) ref += heat(1.0, std::hypot(x + 16.0 * k1, 0.5 + 16.0 * k2));
      }
      CHECK(std::abs(value_at(G, x, 0.5) - ref) < 1e-15 + 1e-12 * ref);
    }
  }

  TEST_CASE("derivative kernel against image sum") {
    const GridSpec g(256, 16.0);
    const Field D = kernel_on_grid(KernelSpec(1.0, 1.0, 1, 0), g);
    const auto dp = [](double x1, double x2) {
      return -3 * x1 / (2 * kPi * std::pow(1 + x1 * x1 + x2 * x2, 2.5));
    };
    const double peak = 3 / (2 * kPi);  // bound on |dP|
    for (auto [x1, x2] : {std::pair{1.0, 0.0}, std::pair{0.5, 1.5}, std::pair{-2.0, 3.0}}) {
      double ref = 0.0;
      for (int k1 = -60; k1 <= 60; ++k1) {
        for (int k2 = -60; k2 <= 60; ++k2) ref += dp(x1 + 16.0 * k1, x2 + 16.0 * k2);
      }
      CHECK(std::abs(value_at(D, x1, x2) - ref) < 1e-7 * peak);
    }
    CHECK(std::abs(mass(D)) < 1e-12);
  }

  TEST_CASE("unit mass and positivity") {
    for (double a : {0.7, 1.0, 1.5, 2.0}) {
      for (auto mode : {KernelSynthesis::point_samples, KernelSynthesis::band_limited}) {
        const Field G = kernel_on_grid(KernelSpec(a, 1.0), GridSpec(256, 16.0), mode);
        // Riemann sum of point samples picks up the transform at the aliases of zero
        double expected = 1.0;
        if (mode == KernelSynthesis::point_samples) {
          const double K = 2 * kPi / G.grid().spacing();
          for (int p1 = -3; p1 <= 3; ++p1) {
            for (int p2 = -3; p2 <= 3; ++p2) {
              if (p1 != 0 || p2 != 0) expected += std::exp(-std::pow(K * std::hypot(p1, p2), a));
            }
          }
          CHECK(min_value(G) >= -1e-10 * max_abs(G));
        }
        CHECK(std::abs(mass(G) - expected) < 1e-13);
      }
    }
  }

  TEST_CASE("band-limited semigroup") {
    const GridSpec g(256, 64.0);
    const double t1 = 1.0, t2 = 1.5;
    const Field a = to_spectral(kernel_on_grid(KernelSpec(0.8, t1), g, KernelSynthesis::band_limited));
    const Field b = to_spectral(kernel_on_grid(KernelSpec(0.8, t2), g, KernelSynthesis::band_limited));
    std::vector<Complex> c(g.spectral_size());
    // both factors carry the phase of a kernel centred mid-box; remove one
    for_each_mode(g, [&](int row, int col, double, double) {
      const std::size_t idx = std::size_t(row) * g.spectral_cols() + col;
      const double sign = (g.mode_index(row) + col) % 2 == 0 ? 1.0 : -1.0;
      c[idx] = a.spectral()[idx] * b.spectral()[idx] * g.cell_area() * sign;
    });
    const Field conv = to_physical(Field::from_spectral(g, c));
    const Field direct = kernel_on_grid(KernelSpec(0.8, t1 + t2), g, KernelSynthesis::band_limited);
    CHECK(qgtest::max_diff(conv, direct) < 1e-10 * max_abs(direct));
  }

  TEST_CASE("self-similar scaling") {
    const std::vector<double> radii{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    CHECK(scaling_check(1.0, 4.0, radii, KernelRoute::closed_form) < 1e-12);
    CHECK(scaling_check(2.0, 9.0, radii, KernelRoute::closed_form) < 1e-12);
    CHECK(scaling_check(1.0, 4.0, radii) < 1e-6);
    CHECK(scaling_check(0.7, 2.0, radii) < 1e-5);
    CHECK(scaling_check(0.7, 8.0, radii) < 1e-5);
  }

  TEST_CASE("algebraic tails") {
    const auto t1 = tail_exponent(KernelSpec(1.0, 1.0));
    CHECK(t1.expected == -3.0);
    CHECK(t1.slope == doctest::Approx(-3.0).epsilon(0.05 / 3));
    const auto t05 = tail_exponent(KernelSpec(0.5, 1.0));
    CHECK(t05.slope == doctest::Approx(-2.5).epsilon(0.04));
    const auto d1 = tail_exponent(KernelSpec(1.0, 1.0, 1, 0));
    CHECK(d1.expected == -4.0);
    CHECK(d1.slope == doctest::Approx(-4.0).epsilon(0.025));
    const auto d15 = tail_exponent(KernelSpec(1.5, 1.0, 0, 1));
    CHECK(d15.slope == doctest::Approx(-4.5).epsilon(0.025));
  }

  TEST_CASE("weighted norms") {
    // int G^2 dx = 1/(8 pi t) for the heat kernel, 1/(8 pi t^2) for Poisson
    CHECK(kernel_weighted_norm(KernelSpec(2.0, 1.0), 0.0, 2.0, 40.0).value ==
          doctest::Approx(std::sqrt(1 / (8 * kPi))).epsilon(1e-10));
    CHECK(kernel_weighted_norm(KernelSpec(1.0, 2.0), 0.0, 2.0, 1e6).value ==
          doctest::Approx(std::sqrt(1 / (8 * kPi * 4))).epsilon(1e-6));
    // int |x|^2 G^2 dx = 2 pi * 2t^2 / (16 pi^2 t^2) = 1/(4 pi)
    CHECK(kernel_weighted_norm(KernelSpec(2.0, 1.0), 1.0, 2.0, 60.0).value ==
          doctest::Approx(std::sqrt(1 / (4 * kPi))).epsilon(1e-10));
    // |x| P(t,x) integrated over |x| <= R: t (asinh(R/t) - R / sqrt(t^2 + R^2))
    const double R = 1e5;
    const auto w = kernel_weighted_norm(KernelSpec(1.0, 1.0), 1.0, 1.0, R);
    CHECK(w.growth_model == "log-power");
    CHECK(w.value == doctest::Approx(std::asinh(R) - R / std::sqrt(1 + R * R)).epsilon(1e-9));
    CHECK(w.growth_exponent == doctest::Approx(1.0).epsilon(0.05));
    // |x|^3 P ~ 1/(2 pi): the norm grows like R^2
    const auto pw = kernel_weighted_norm(KernelSpec(1.0, 1.0), 3.0, 1.0, 1e4);
    CHECK(pw.growth_model == "power");
    CHECK(pw.growth_exponent == doctest::Approx(2.0).epsilon(0.01));
  }

  TEST_CASE("resolution guard") {
    CHECK_THROWS_AS(check_resolution(KernelSpec(1.0, 1.0), GridSpec(256, 8.0)), ResolutionError);
    CHECK_THROWS_AS(check_resolution(KernelSpec(1.0, 1.0), GridSpec(32, 16.0)), ResolutionError);
    CHECK_NOTHROW(check_resolution(KernelSpec(1.0, 1.0), GridSpec(64, 16.0)));
    CHECK_THROWS_AS(kernel_on_grid(KernelSpec(2.0, 0.01), GridSpec(64, 16.0)), ResolutionError);
    CHECK_THROWS_AS(KernelSpec(0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(KernelSpec(1.0, -1.0), InvalidArgument);
  }

  TEST_CASE("kernel table csv") {
    std::ostringstream os;
    const std::vector<double> r{0.0, 1.0}, v{0.5, 0.25};
    write_kernel_table_csv(os, r, v);
    CHECK(os.str() == "r,value\n0,0.5\n1,0.25\n");
    CHECK_THROWS_AS(write_kernel_table_csv(os, r, std::vector<double>{1.0}), InvalidArgument);
  }
}
