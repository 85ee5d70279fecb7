#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qg/diagnostics.hpp"
#include "qg/ensemble.hpp"
#include "qg/field.hpp"

namespace qg {

/// Which power of f enters the half-derivative side.
enum class SvPower {
  signed_power,  // sgn(f)|f|^{q/2}
  absolute,      // |f|^{q/2}
};

struct SvGap {
  double lhs = 0.0;  // integral of |f|^{q-2} f (-Delta)^{alpha/2} f
  double rhs = 0.0;  // (2/q) ||(-Delta)^{alpha/4} F||_2^2 with F the chosen power
  double gap = 0.0;
  double aliased_fraction = 0.0;  // energy share of F outside the 2/3 square
  bool aliasing_warning = false;  // aliased_fraction > 1%
};

/// q >= 2, alpha in [0, 2]. Both sides use the spectral multiplier on the grid.
SvGap sv_gap(const Field& f, double q, double alpha, SvPower power = SvPower::signed_power);

/// ||(-Delta)^{-sigma/2} f||_{p*} / ||f||_p with 1/p* = 1/p - sigma/2, after
/// removing the mean of f. Requires 0 < sigma < 2 and 1 < p < 2/sigma.
double hls_ratio(const Field& f, double sigma, double p);

/// ||(-Delta)^{sigma/2} f||_p / (||f||_{p1}^{1-sigma/s} ||(-Delta)^{s/2} f||_{p2}^{sigma/s}),
/// 0 <= sigma < s < 2. Pass p = 0 to derive p from the interpolation relation;
/// an explicit p violating it is rejected. Infinite exponents are allowed.
double gn_ratio(const Field& f, double sigma, double s, double p1, double p2, double p = 0.0);

struct KatoPonceExponents {
  double p = 2.0;
  double p1 = std::numeric_limits<double>::infinity();
  double p2 = 2.0;
  double p3 = 2.0;
  double p4 = std::numeric_limits<double>::infinity();
};

/// ||[(-Delta)^{s/2}, g] f||_p over
/// ||grad g||_{p1} ||(-Delta)^{(s-1)/2} f||_{p2} + ||(-Delta)^{s/2} g||_{p3} ||f||_{p4}.
/// f must have zero mean when s < 1. Returns 0 when both sides vanish.
double kato_ponce_ratio(const Field& f, const Field& g, double s,
                        const KatoPonceExponents& e = {});

/// Smooth profile F(xi) for the weight-commutator identity.
using XiProfile = std::function<double(double, double)>;
XiProfile gaussian_profile(double c1, double c2, double width);
XiProfile affine_profile(double a0, double a1, double a2);

struct WeightCommutatorResult {
  double lhs = 0.0;              // |xi|^a (-Lap F) + Lap(|xi|^a F), finite differences
  double rhs = 0.0;              // a^2 |xi|^{a-2} F + 2a |xi|^{a-2} xi.grad F
  double relative_error = 0.0;   // |lhs - rhs| / (|first term| + |second term|)
  double printed_rhs = 0.0;      // same with a(a-1) in place of a^2
  double printed_discrepancy = 0.0;
};

/// Evaluates [|xi|^alpha, -Delta_xi] F at xi0 with the 9-point isotropic
/// Laplacian of step h; the gradient uses 6th-order central differences.
/// Throws InvalidArgument if |xi0| <= 4h.
WeightCommutatorResult weight_commutator_check(const XiProfile& F, double alpha, double xi1,
                                               double xi2, double h);

/// log2(err(h) / err(h/2)).
double weight_commutator_order(const XiProfile& F, double alpha, double xi1, double xi2, double h);

struct InequalitySuiteConfig {
  std::uint64_t seed = 0;
  int members = 1000;
  SpectrumLaw law{};
  int n_coarse = 128;
  int n_fine = 256;
  int jobs = 1;
  std::vector<double> sv_q{3.0, 4.0, 6.0};
  std::vector<double> sv_alpha{0.5, 1.0, 1.5};
  double sv_tolerance = 1e-9;
  double hls_sigma = 1.0;
  double hls_p = 4.0 / 3.0;
  double gn_sigma = 0.5;
  double gn_s = 1.5;
  double gn_p1 = 2.0;
  double gn_p2 = 2.0;
  std::vector<double> kp_s{0.5, 1.0, 1.5};
  KatoPonceExponents kp_exponents{};
  double refinement_tolerance = 0.10;
  double commutator_alpha = 1.0;
  double commutator_xi1 = 1.0;
  double commutator_xi2 = 0.0;
  double commutator_h = 1e-3;
  double commutator_tolerance = 1e-6;
};

/// One ensemble sweep. For sv series `values` holds gap / |lhs| on the coarse
/// grid; for ratio series `values` is the coarse grid and `fine_values` the fine one.
struct EnsembleSeries {
  std::string name;
  std::vector<double> values;
  std::vector<double> fine_values;
  double max = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double fine_max = 0.0;
  double refinement_change = 0.0;  // |fine_max - max| / max
  int aliasing_warnings = 0;
};

struct InequalitySuiteReport {
  InequalitySuiteConfig config;
  std::vector<EnsembleSeries> series;
  WeightCommutatorResult commutator;
  double commutator_order = 0.0;
  std::vector<Verdict> verdicts;
};

InequalitySuiteReport run_inequality_suite(const InequalitySuiteConfig& config);

}  // namespace qg
