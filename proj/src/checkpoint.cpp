#include "qg/checkpoint.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qg/errors.hpp"

namespace qg {
namespace {

constexpr char kMagic[8] = {'Q', 'G', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr std::uint32_t kTag = 0x01020304u;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, bool swap) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw InvalidArgument("checkpoint: truncated stream");
  }
  if (swap) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof v);
  }
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Field& theta, double t, double alpha) {
  const Field f = theta.has_physical() ? theta : to_physical(theta);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kTag);
  put<std::int32_t>(out, f.grid().n());
  put<double>(out, f.grid().box_length());
  put<double>(out, t);
  put<double>(out, alpha);
  const auto v = f.physical();
  out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
  if (!out) throw Error("checkpoint: write failed");
}

void write_checkpoint(const std::filesystem::path& path, const Field& theta, double t,
                      double alpha) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot open " + path.string());
  write_checkpoint(out, theta, t, alpha);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw InvalidArgument("checkpoint: bad magic");
  }
  const auto tag = get<std::uint32_t>(in, false);
  bool swap = false;
  if (tag != kTag) {
    if (tag != 0x04030201u) throw InvalidArgument("checkpoint: bad endianness tag");
    swap = true;
  }
  const int n = get<std::int32_t>(in, swap);
  const double L = get<double>(in, swap);
  const double t = get<double>(in, swap);
  const double alpha = get<double>(in, swap);
  const GridSpec grid(n, L);
  std::vector<double> values(grid.physical_size());
  for (auto& v : values) v = get<double>(in, swap);
  return {Field::from_physical(grid, std::move(values)), t, alpha};
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace qg
