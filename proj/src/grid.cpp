#include "qg/grid.hpp"

#include <string>

#include "qg/errors.hpp"

namespace qg {

GridSpec::GridSpec(int n, double box_length) : n_(n), length_(box_length) {
  if (n < 32 || (n & (n - 1)) != 0) {
    throw InvalidArgument("grid: n must be a power of two >= 32, got " + std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw InvalidArgument("grid: box length must be positive");
  }
}

}  // namespace qg
