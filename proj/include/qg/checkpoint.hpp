#pragma once

#include <filesystem>
#include <iosfwd>

#include "qg/field.hpp"

namespace qg {

/// Binary field dump.
///
/// Layout (native byte order, the tag tells readers which one):
///   8 bytes   magic "QGFIELD1"
///   uint32    endianness tag 0x01020304
///   int32     n
///   float64   L, t, alpha
///   float64   n*n physical values, row-major, first index along x1
struct Checkpoint {
  Field theta;
  double t;
  double alpha;
};

void write_checkpoint(std::ostream& out, const Field& theta, double t, double alpha);
void write_checkpoint(const std::filesystem::path& path, const Field& theta, double t,
                      double alpha);

/// Accepts either byte order. Throws InvalidArgument on a malformed stream.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace qg
