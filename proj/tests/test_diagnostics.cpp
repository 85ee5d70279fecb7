#include <random>

#include "doctest.h"
#include "qg/diagnostics.hpp"
#include "qg/duhamel.hpp"
#include "qg/errors.hpp"
#include "qg/fit.hpp"
#include "qg/spectral.hpp"
#include "test_helpers.hpp"

using namespace qg;
using qgtest::kPi;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

SimConfig duhamel_config(bool nonlinear) {
  SimConfig c;
  c.alpha = 1.0;
  c.grid = GridSpec(128, 96.0);
  c.initial.amplitude = 0.05;
  c.initial.family = nonlinear ? InitialFamily::double_gaussian : InitialFamily::radial_gaussian;
  c.initial.offset = 2.0;
  c.initial.width = 1.5;
  c.nonlinear = nonlinear;
  c.rescale = false;
  c.t_end = 1.0;
  c.dt_fixed = 0.05;
  c.sample_every_step = true;
  return c;
}

}  // namespace

TEST_SUITE("fit") {
  TEST_CASE("exact power law") {
    std::vector<double> t, y;
    for (int i = 0; i <= 20; ++i) {
      t.push_back(std::pow(10.0, 3.0 * i / 20));
      y.push_back(3.0 * std::pow(t.back(), -2.0));
    }
    const RateFit f = fit_rate(t, y, RateModel::power);
    CHECK(f.exponent == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.rms_residual < 1e-12);
    CHECK(f.samples == 21);
  }

  TEST_CASE("exact log-power law") {
    std::vector<double> t, y;
    for (int i = 0; i <= 30; ++i) {
      t.push_back(std::pow(10.0, 4.0 * i / 30));
      y.push_back(2.0 * std::pow(std::log(2.0 + t.back()), 1.5));
    }
    const RateFit f = fit_rate(t, y, RateModel::log_power);
    CHECK(f.exponent == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(to_string(RateModel::log_power) == "log-power");
  }

  TEST_CASE("noisy fit carries a t-based interval") {
    std::mt19937 rng(5);
    std::normal_distribution<double> nd(0.0, 0.02);
    std::vector<double> t, y;
    for (int i = 0; i < 20; ++i) {
      t.push_back(std::pow(10.0, 2.0 * i / 19));
      y.push_back(std::pow(t.back(), -0.75) * std::exp(nd(rng)));
    }
    const RateFit f = fit_rate(t, y, RateModel::power);
    CHECK(f.std_error > 0.0);
    CHECK(f.ci_low < -0.75);
    CHECK(f.ci_high > -0.75);
    // t_{0.975} with 18 degrees of freedom
    CHECK((f.ci_high - f.exponent) / f.std_error == doctest::Approx(2.100922).epsilon(1e-6));
  }

  TEST_CASE("span and sample guards") {
    std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8, 9}, y(9, 1.0);
    CHECK_THROWS_AS(fit_rate(t, y, RateModel::power), InsufficientSpan);
    std::vector<double> t2{1, 10, 100}, y2{1, 2, 3};
    CHECK_THROWS_AS(fit_rate(t2, y2, RateModel::power), InsufficientSpan);
    CHECK_NOTHROW(fit_rate(t2, y2, RateModel::power, 3));
    CHECK_THROWS_AS(fit_rate(t2, y2, RateModel::power, 3, 2.5), InsufficientSpan);
  }

  TEST_CASE("straight line") {
    std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rms < 1e-14);
  }
}

TEST_SUITE("diagnostics") {
  TEST_CASE("weighted norms of a Gaussian") {
    const GridSpec g(256, 32.0);
    const Field f = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
    // int e^{-r^2} = pi, int r^2 e^{-r^2} = pi, (int e^{-2 r^2})^{1/2} = (pi/2)^{1/2}
    CHECK(weighted_norm(f, 0.0, 1.0, 8.0).value == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(weighted_norm(f, 2.0, 1.0, 8.0).value == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(weighted_norm(f, 0.0, 2.0, 8.0).value == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-12));
    // max of r e^{-r^2} is e^{-1/2}/sqrt 2 at r = 1/sqrt 2
    const double sup = weighted_norm(f, 1.0, kInfinity, 8.0).value;
    CHECK(sup <= std::exp(-0.5) / std::sqrt(2.0) * (1 + 1e-14));
    CHECK(sup == doctest::Approx(std::exp(-0.5) / std::sqrt(2.0)).epsilon(1e-2));
    CHECK(weighted_norm(f, 0.0, 2.0, 8.0).contamination < 1e-30);
    const Field one = sample(g, [](double, double) { return 1.0; });
    CHECK(weighted_norm(one, 0.0, 2.0, 8.0).contamination == 1.0);
    CHECK(weighted_norm(Field::zeros(g), 0.0, 2.0, 8.0).contamination == 0.0);
    CHECK_THROWS_AS(weighted_norm(f, 0.0, 2.0, 9.0), InvalidArgument);
    CHECK_THROWS_AS(weighted_norm(f, 0.0, 0.5, 8.0), InvalidArgument);
  }

  TEST_CASE("Sobolev norm of a single mode") {
    const GridSpec g(64, 2 * kPi);
    const Field f = sample(g, [](double x, double) { return std::cos(3 * x); });
    const SobolevNorm s = sobolev_norm(f, 1.5);
    CHECK(s.value == doctest::Approx(std::pow(3.0, 1.5) * kPi * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.outer_fraction < 1e-20);
    const Field high = sample(g, [](double x, double) { return std::cos(30 * x); });
    CHECK(sobolev_norm(high, 1.0).outer_fraction == doctest::Approx(1.0));
  }

  TEST_CASE("linear residual for a Gaussian at alpha 2") {
    // G(t) * eps e^{-r^2/w^2} = M heat(t + w^2/4, r), M = eps pi w^2
    InitialDataParams p;
    p.amplitude = 0.05;
    p.width = 1.5;
    const auto prof = make_profile(p);
    const double M = prof.mass();
    const std::vector<double> times{1.0, 4.0};
    const auto rep = linear_lemma_check(prof, 2.0, times, 256, 32.0);
    REQUIRE(rep.times.size() == 2);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      const double L = std::max(32.0 * std::sqrt(t), 16.0 * prof.extent());
      const auto heat = [](double s, double r) { return std::exp(-r * r / (4 * s)) / (4 * kPi * s); };
      const double sq = simpson([&](double r) {
        const double d = M * (heat(t + 0.5625, r) - heat(t, r));
        return std::pow(r, 4) * d * d * 2 * kPi * r;
      }, 0.0, L / 4);
      CHECK(rep.residual[i] == doctest::Approx(std::sqrt(sq)).epsilon(1e-6));
      CHECK(rep.trusted[i]);
    }
  }
}

TEST_SUITE("duhamel") {
  TEST_CASE("linear trajectory satisfies the mild form") {
    const Trajectory tr = integrate(duhamel_config(false));
    CHECK(duhamel_residual(tr) < 1e-10);
  }

  TEST_CASE("nonlinear trajectory satisfies the mild form") {
    const Trajectory tr = integrate(duhamel_config(true));
    const DuhamelReport rep = duhamel_check(tr);
    CHECK(rep.times.size() == tr.samples.size() - 1);
    CHECK(rep.max_residual < 1e-8);
  }

  TEST_CASE("product integration of a polynomial forcing") {
    // F(tau) = tau^2 on one mode: int_0^s e^{-l (s - tau)} tau^2 dtau in closed form
    const GridSpec g(32, 2 * kPi);
    std::vector<double> nodes;
    for (int i = 0; i <= 10; ++i) nodes.push_back(0.1 * i);
    const ProductIntegrator pi(1.0, g, nodes, 4);
    std::vector<std::vector<Complex>> forcing;
    for (double s : nodes) forcing.emplace_back(g.spectral_size(), Complex(s * s));
    const auto out = pi.integrate(forcing);
    const double lam = 5.0;  // mode (3, 4)
    const std::size_t idx = 3 * g.spectral_cols() + 4;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double s = nodes[j];
      const double exact = (s * s / lam - 2 * s / (lam * lam) + 2 / (lam * lam * lam)) -
                           2 / (lam * lam * lam) * std::exp(-lam * s);
      CHECK(std::abs(out[j][idx] - Complex(exact)) < 1e-14);
    }
    // zero mode: plain integral s^3/3
    CHECK(std::abs(out.back()[0] - Complex(1.0 / 3.0)) < 1e-14);
  }

  TEST_CASE("Picard iterates") {
    SimConfig c = duhamel_config(true);
    c.initial.amplitude = 1e-3;
    const Field th0 = make_initial_data(c.initial, c.grid);
    const auto seq = picard_sequence(th0, 1.0, 0.5, 3, 32);
    REQUIRE(seq.size() == 4);
    const Field th0_hat = to_spectral(th0);
    const auto lin = linear_propagate({th0_hat.spectral().begin(), th0_hat.spectral().end()}, 1.0, c.grid, 0.5);
    CHECK(qgtest::max_diff(seq[0], to_physical(Field::from_spectral(c.grid, lin))) < 1e-15);
    const double d1 = qgtest::max_diff(seq[1], seq[0]);
    const double d2 = qgtest::max_diff(seq[2], seq[1]);
    const double d3 = qgtest::max_diff(seq[3], seq[2]);
    CHECK(d1 > 0.0);
    CHECK(d2 < 0.5 * d1);
    CHECK(d3 < 0.5 * d2);
    CHECK(qgtest::max_diff(picard_iterate(th0, 1.0, 0.5, 3, 32), seq[3]) == 0.0);
  }
}
