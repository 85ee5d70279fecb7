#include "qg/duhamel.hpp"

#include <algorithm>
#include <cmath>

#include "qg/errors.hpp"
#include "qg/spectral.hpp"

namespace qg {
namespace {

// m_i = int_0^H exp(-lambda (H - tau)) tau^i dtau, i < q.
void exp_moments(double lambda, double H, int q, double* m) {
  const double x = lambda * H;
  if (x <= 1.0) {
    // H^{i+1} i! sum_j (-x)^j / (j+i+1)!
    double fact = 1.0;  // i!
    double hp = H;      // H^{i+1}
    for (int i = 0; i < q; ++i) {
      if (i > 0) fact *= i, hp *= H;
      double term = 1.0;
      for (int r = 1; r <= i + 1; ++r) term /= r;  // 1/(i+1)!
      double sum = term;
      for (int j = 1; j < 60; ++j) {
        term *= -x / (j + i + 1);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      m[i] = hp * fact * sum;
    }
    return;
  }
  m[0] = -std::expm1(-x) / lambda;
  double hk = 1.0;
  for (int i = 1; i < q; ++i) {
    hk *= H;
    m[i] = (hk - i * m[i - 1]) / lambda;
  }
}

// Monomial coefficients (in tau - origin) of the Lagrange basis on `pts`.
std::vector<std::vector<double>> lagrange_monomials(const std::vector<double>& pts, double origin) {
  const int q = int(pts.size());
  std::vector<std::vector<double>> out(q, std::vector<double>(q, 0.0));
  for (int j = 0; j < q; ++j) {
    std::vector<double> poly{1.0};
    double denom = 1.0;
    for (int l = 0; l < q; ++l) {
      if (l == j) continue;
      const double root = pts[l] - origin;
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t a = 0; a < poly.size(); ++a) {
        next[a + 1] += poly[a];
        next[a] -= root * poly[a];
      }
      poly = std::move(next);
      denom *= pts[j] - pts[l];
    }
    for (int a = 0; a < q; ++a) out[j][a] = poly[a] / denom;
  }
  return out;
}

std::vector<Complex> spectrum_of(const Field& f) {
  const Field s = f.has_spectral() ? f : to_spectral(f);
  return {s.spectral().begin(), s.spectral().end()};
}

double spectral_norm2(const GridSpec& g, const std::vector<Complex>& c) {
  return spectral_l2_norm(Field::from_spectral(g, c));
}

}  // namespace

ProductIntegrator::ProductIntegrator(double alpha, const GridSpec& grid,
                                     std::vector<double> nodes, int n_quad)
    : grid_(grid), nodes_(std::move(nodes)), n_quad_(n_quad) {
  if (n_quad < 2 || n_quad > 8) throw InvalidArgument("n_quad must lie in [2, 8]");
  if (int(nodes_.size()) < n_quad) {
    throw InvalidArgument("insufficient trajectory density: need at least n_quad time nodes");
  }
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    if (!(nodes_[j] > nodes_[j - 1])) throw InvalidArgument("time nodes must increase");
  }
  lambda_.resize(grid.spectral_size());
  const int cols = grid.spectral_cols();
  for_each_mode(grid, [&](int i, int j, double k1, double k2) {
    lambda_[std::size_t(i) * cols + j] = std::pow(std::hypot(k1, k2), alpha);
  });
}

std::vector<std::vector<Complex>> ProductIntegrator::integrate(
    const std::vector<std::vector<Complex>>& forcing) const {
  const int J = int(nodes_.size());
  if (int(forcing.size()) != J) throw InvalidArgument("forcing/node count mismatch");
  const std::size_t m = lambda_.size();
  std::vector<std::vector<Complex>> out(J, std::vector<Complex>(m));
  std::vector<double> mom(n_quad_);
  for (int k = 0; k + 1 < J; ++k) {
    const int start = std::clamp(k - (n_quad_ / 2 - 1), 0, J - n_quad_);
    const std::vector<double> pts(nodes_.begin() + start, nodes_.begin() + start + n_quad_);
    const auto basis = lagrange_monomials(pts, nodes_[k]);
    const double H = nodes_[k + 1] - nodes_[k];
    for (std::size_t idx = 0; idx < m; ++idx) {
      const double lam = lambda_[idx];
      if (lam == 0.0) {
        double hp = H;
        for (int i = 0; i < n_quad_; ++i, hp *= H) mom[i] = hp / (i + 1);
      } else {
        exp_moments(lam, H, n_quad_, mom.data());
      }
      Complex panel = 0.0;
      for (int j = 0; j < n_quad_; ++j) {
        double w = 0.0;
        for (int i = 0; i < n_quad_; ++i) w += basis[j][i] * mom[i];
        panel += w * forcing[start + j][idx];
      }
      out[k + 1][idx] = std::exp(-lam * H) * out[k][idx] + panel;
    }
  }
  return out;
}

std::vector<Complex> linear_propagate(const std::vector<Complex>& th0, double alpha,
                                      const GridSpec& grid, double s) {
  std::vector<Complex> out(th0.size());
  const int cols = grid.spectral_cols();
  for_each_mode(grid, [&](int i, int j, double k1, double k2) {
    const std::size_t idx = std::size_t(i) * cols + j;
    out[idx] = std::exp(-s * std::pow(std::hypot(k1, k2), alpha)) * th0[idx];
  });
  return out;
}

DuhamelReport duhamel_check(const Trajectory& tr, int n_quad) {
  if (tr.samples.empty()) throw InvalidArgument("duhamel: empty trajectory");
  if (!tr.rescales.empty()) {
    throw InvalidArgument("duhamel: trajectory spans a box rescale; disable rescaling");
  }
  if (int(tr.samples.size()) < n_quad + 1) {
    throw InvalidArgument("insufficient trajectory density: need at least n_quad + 1 samples");
  }
  const GridSpec grid = tr.samples.front().theta.grid();
  const Stepper stepper(tr.config.alpha, grid, tr.config.c_cfl, tr.config.nonlinear);

  std::vector<double> nodes;
  std::vector<std::vector<Complex>> forcing, states;
  for (const auto& s : tr.samples) {
    nodes.push_back(s.t);
    states.push_back(spectrum_of(s.theta));
    std::vector<Complex> f;
    stepper.nonlinear_spectral(states.back(), f);
    forcing.push_back(std::move(f));
  }
  const auto integral = ProductIntegrator(tr.config.alpha, grid, nodes, n_quad).integrate(forcing);

  DuhamelReport rep;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    auto pred = linear_propagate(states.front(), tr.config.alpha, grid, nodes[j]);
    for (std::size_t k = 0; k < pred.size(); ++k) pred[k] = states[j][k] - (pred[k] + integral[j][k]);
    const double denom = spectral_norm2(grid, states[j]);
    const double r = denom > 0.0 ? spectral_norm2(grid, pred) / denom : spectral_norm2(grid, pred);
    rep.times.push_back(nodes[j]);
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

double duhamel_residual(const Trajectory& tr, int n_quad) {
  return duhamel_check(tr, n_quad).max_residual;
}

std::vector<Field> picard_sequence(const Field& theta0, double alpha, double t, int k,
                                   int panels, int n_quad) {
  if (k < 0 || k > 4) throw InvalidArgument("picard: k must lie in [0, 4]");
  if (!(t > 0.0)) throw InvalidArgument("picard: t must be positive");
  if (panels < n_quad) throw InvalidArgument("picard: need at least n_quad panels");
  const GridSpec& grid = theta0.grid();
  const std::vector<Complex> th0 = spectrum_of(theta0);
  std::vector<double> nodes(panels + 1);
  for (int j = 0; j <= panels; ++j) nodes[j] = t * j / panels;

  std::vector<std::vector<Complex>> lin(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) lin[j] = linear_propagate(th0, alpha, grid, nodes[j]);

  const Stepper stepper(alpha, grid);
  const ProductIntegrator integ(alpha, grid, nodes, n_quad);
  std::vector<std::vector<Complex>> iter = lin;
  std::vector<Field> result{to_physical(Field::from_spectral(grid, iter.back()))};
  double prev_diff = -1.0;
  for (int it = 1; it <= k; ++it) {
    std::vector<std::vector<Complex>> forcing(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) stepper.nonlinear_spectral(iter[j], forcing[j]);
    const auto integral = integ.integrate(forcing);
    std::vector<std::vector<Complex>> next(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      next[j] = lin[j];
      for (std::size_t q = 0; q < next[j].size(); ++q) next[j][q] += integral[j][q];
    }
    std::vector<Complex> diff(next.back().size());
    for (std::size_t q = 0; q < diff.size(); ++q) diff[q] = next.back()[q] - iter.back()[q];
    const double d = spectral_norm2(grid, diff);
    const double size = spectral_norm2(grid, next.back());
    if (!std::isfinite(d) || (prev_diff >= 0.0 && d > prev_diff && d > 1e-3 * size)) {
      throw NumericalError("Picard iteration diverging; reduce the amplitude");
    }
    prev_diff = d;
    iter = std::move(next);
    result.push_back(to_physical(Field::from_spectral(grid, iter.back())));
  }
  return result;
}

Field picard_iterate(const Field& theta0, double alpha, double t, int k, int panels, int n_quad) {
  return picard_sequence(theta0, alpha, t, k, panels, n_quad).back();
}

}  // namespace qg
