#ifndef SHUFFLE_SPECTRA_KERNEL_IO_HPP
#define SHUFFLE_SPECTRA_KERNEL_IO_HPP

// Kernel export formats.
//
// CSV: one kernel row per line, entries comma-separated in "%.17g", LF endings,
//      no header (the file is a matrix); lines starting with '#' are comments.
// Binary: 8-byte magic "SSKERNEL", uint64 n (little-endian), then n*n
//      little-endian IEEE-754 doubles, row-major.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid_kernel.hpp"

namespace shuffle_spectra {

inline constexpr std::array<char, 8> kKernelMagic{'S', 'S', 'K', 'E', 'R', 'N', 'E', 'L'};

static_assert(std::endian::native == std::endian::little, "binary kernel format assumes a little-endian host");

/// "%.17g": shortest printf form that round-trips every double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) os << ',';
    os << format_double(values[j]);
  }
  os << '\n';
}

inline void write_kernel_csv(std::ostream& os, const GridKernel& k) {
  for (std::size_t i = 0; i < k.size(); ++i) write_csv_row(os, k.row(i));
}

inline GridKernel read_kernel_csv(std::istream& is) {
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t count = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      data.push_back(std::stod(cell));
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw std::runtime_error("kernel CSV: ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows != cols) throw std::runtime_error("kernel CSV: matrix is not square");
  return GridKernel(rows, std::move(data));
}

inline void write_kernel_binary(std::ostream& os, const GridKernel& k) {
  os.write(kKernelMagic.data(), kKernelMagic.size());
  const std::uint64_t n = k.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  const auto e = k.entries();
  os.write(reinterpret_cast<const char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(double)));
  if (!os) throw std::runtime_error("kernel binary: write failed");
}

inline GridKernel read_kernel_binary(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kKernelMagic) throw std::runtime_error("kernel binary: bad magic");
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || n == 0 || n > (1ULL << 20)) throw std::runtime_error("kernel binary: bad size header");
  std::vector<double> data(n * n);
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) throw std::runtime_error("kernel binary: truncated payload");
  return GridKernel(static_cast<std::size_t>(n), std::move(data));
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_KERNEL_IO_HPP
