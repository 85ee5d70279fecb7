#include "qg/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qg/errors.hpp"

namespace qg {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Plans are intentionally never destroyed: they live for the whole process.
const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t nreal = std::size_t(n) * n;
  const std::size_t ncplx = std::size_t(n) * (n / 2 + 1);
  double* r = fftw_alloc_real(nreal);
  fftw_complex* c = fftw_alloc_complex(ncplx);
  // FFTW_ESTIMATE keeps plan selection (and hence rounding) reproducible run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(n, n, r, c, flags);
  p.inverse = fftw_plan_dft_c2r_2d(n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (!p.forward || !p.inverse) throw Error("fft: plan creation failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

void forward_fft(const GridSpec& grid, std::span<const double> in, std::span<Complex> out) {
  if (in.size() != grid.physical_size() || out.size() != grid.spectral_size()) {
    throw InvalidArgument("fft: buffer size mismatch");
  }
  const PlanPair& p = plans_for(grid.n());
  // Out-of-place r2c preserves its input.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse_fft(const GridSpec& grid, std::span<const Complex> in, std::span<double> out) {
  if (in.size() != grid.spectral_size() || out.size() != grid.physical_size()) {
    throw InvalidArgument("fft: buffer size mismatch");
  }
  const PlanPair& p = plans_for(grid.n());
  // c2r destroys its input, so work on a copy.
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / double(grid.physical_size());
  for (double& v : out) v *= scale;
}

}  // namespace qg
