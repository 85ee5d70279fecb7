#include "qg/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "qg/errors.hpp"

namespace qg {

FieldEnsemble::FieldEnsemble(std::uint64_t seed, int count, SpectrumLaw law)
    : seed_(seed), count_(count), law_(law) {
  if (count < 1) throw InvalidArgument("ensemble: count must be positive");
  if (law.band < 1) throw InvalidArgument("ensemble: band must be >= 1");
}

Field FieldEnsemble::member(int i, int n) const {
  if (i < 0 || i >= count_) throw InvalidArgument("ensemble: member index out of range");
  if (3 * law_.band >= n) throw ResolutionError("ensemble: band must stay below n/3");
  const GridSpec grid(n, 2.0 * std::numbers::pi);
  const int K = law_.band;

  std::seed_seq seq{std::uint32_t(seed_), std::uint32_t(seed_ >> 32), std::uint32_t(i)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;

  struct Coef {
    int m1, m2;
    Complex a;
  };
  std::vector<Coef> coefs;
  double energy = 0.0;
  const auto draw = [&](int m1, int m2) {
    const double sd = std::pow(std::hypot(double(m1), double(m2)), -law_.decay);
    const double re = normal(rng), im = normal(rng);
    const Complex a = sd * Complex(re, im) / std::numbers::sqrt2;
    coefs.push_back({m1, m2, a});
    energy += 2.0 * std::norm(a);  // the mirror mode carries the same energy
  };
  for (int m2 = 1; m2 <= K; ++m2) {
    for (int m1 = -K; m1 <= K; ++m1) draw(m1, m2);
  }
  for (int m1 = 1; m1 <= K; ++m1) draw(m1, 0);
  // ||f||_2^2 = (2 pi)^2 sum |a_m|^2 over the full set
  const double norm = 2.0 * std::numbers::pi * std::sqrt(energy);

  const int cols = grid.spectral_cols();
  std::vector<Complex> c(grid.spectral_size());
  const double nn = double(n) * n;
  for (const auto& k : coefs) {
    const double sign = ((k.m1 + k.m2) % 2 == 0) ? 1.0 : -1.0;  // grid starts at -pi
    const Complex v = nn * sign * k.a / norm;
    const int row = (k.m1 + n) % n;
    c[std::size_t(row) * cols + k.m2] = v;
    if (k.m2 == 0) c[std::size_t((n - k.m1) % n) * cols] = std::conj(v);
  }
  return to_physical(Field::from_spectral(grid, std::move(c)));
}

void parallel_for(int count, const std::function<void(int)>& fn, int jobs) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> parallel_indexed(int count, const std::function<double(int)>& fn, int jobs) {
  std::vector<double> out(std::size_t(std::max(count, 0)));
  parallel_for(count, [&](int i) { out[i] = fn(i); }, jobs);
  return out;
}

std::vector<double> FieldEnsemble::map(const std::function<double(int)>& fn, int jobs) const {
  return parallel_indexed(count_, fn, jobs);
}

}  // namespace qg
