#ifndef SHUFFLE_SPECTRA_GRID_KERNEL_HPP
#define SHUFFLE_SPECTRA_GRID_KERNEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ideal.hpp"
#include "parallel.hpp"

namespace shuffle_spectra {

/// How row i of B(n) picks its starting point a.
enum class GridConvention {
  Endpoint,     // a = i/n, as in the reference computation
  CellAverage,  // a averaged over ((i-1)/n, i/n) with 8-point Gauss-Legendre
};

struct KernelOptions {
  GridConvention convention = GridConvention::Endpoint;
  double tol = 1e-12;
  unsigned threads = 1;
};

namespace detail {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline constexpr std::array<double, 8> kGaussNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                   0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                     0.2223810344533745, 0.1012285362903763};

// CDF values r_j = G_a^{-1}(j/n), j = 0..n, by a warm-started sweep over j.
inline void inverse_sweep(const IdealMap& map, std::size_t n, double tol, std::span<double> r) {
  double u = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j <= n; ++j) {
    u = map.inverse(static_cast<double>(j) / nn, tol, u);
    r[j] = u;
  }
}

}  // namespace detail

/**
 * Row i (1-based) of B(n) into `row` (length n): b_ij is the probability that
 * G_a(V), V uniform, falls in ((j-1)/n, j/n]. `cdf` is scratch of length n+1.
 */
inline void kernel_row(std::size_t n, std::size_t i, std::span<double> row, std::span<double> cdf,
                       const KernelOptions& opt = {}) {
  const double nn = static_cast<double>(n);
  if (opt.convention == GridConvention::Endpoint) {
    detail::inverse_sweep(IdealMap(static_cast<double>(i) / nn), n, opt.tol, cdf);
    for (std::size_t j = 0; j < n; ++j) row[j] = cdf[j + 1] - cdf[j];
    return;
  }
  std::fill(row.begin(), row.end(), 0.0);
  const double mid = (static_cast<double>(i) - 0.5) / nn;
  const double half = 0.5 / nn;
  for (std::size_t q = 0; q < detail::kGaussNodes.size(); ++q) {
    const double a = std::clamp(mid + half * detail::kGaussNodes[q], 0.0, 1.0);
    detail::inverse_sweep(IdealMap(a), n, opt.tol, cdf);
    const double w = 0.5 * detail::kGaussWeights[q];
    for (std::size_t j = 0; j < n; ++j) row[j] += w * (cdf[j + 1] - cdf[j]);
  }
}

/// Dense row-major n x n kernel B(n). Rows and columns are 0-based here.
class GridKernel {
 public:
  GridKernel() = default;
  GridKernel(std::size_t n, std::vector<double> entries) : n_(n), data_(std::move(entries)) {
    if (data_.size() != n_ * n_) throw std::invalid_argument("GridKernel: entry count must be n*n");
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const double> entries() const noexcept { return data_; }

  /// y = B x
  void apply(std::span<const double> x, std::span<double> y, unsigned threads = 1) const {
    check(x, y);
    parallel_chunks(n_, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double* r = data_.data() + i * n_;
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += r[j] * x[j];
        y[i] = acc;
      }
    });
  }

  /**
   * y = B^T x. Threads own fixed-width column blocks and every y[j] is summed
   * over rows in order, so the result does not depend on the thread count.
   */
  void apply_transpose(std::span<const double> x, std::span<double> y, unsigned threads = 1) const {
    check(x, y);
    const std::size_t blocks = (n_ + kColumnBlock - 1) / kColumnBlock;
    parallel_chunks(blocks, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::array<double, kColumnBlock> acc;
      for (std::size_t blk = begin; blk < end; ++blk) {
        const std::size_t j0 = blk * kColumnBlock, width = std::min(kColumnBlock, n_ - j0);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
          const double* r = data_.data() + i * n_ + j0;
          const double xi = x[i];
          for (std::size_t j = 0; j < width; ++j) acc[j] += xi * r[j];
        }
        std::copy_n(acc.begin(), width, y.begin() + static_cast<std::ptrdiff_t>(j0));
      }
    });
  }

  /// y = (B x + sign * B^T x) / 2; a row pass and a column pass.
  void apply_split(std::span<const double> x, std::span<double> y, double sign, unsigned threads = 1) const {
    check(x, y);
    std::vector<double> bt(n_);
    apply_transpose(x, bt, threads);
    apply(x, y, threads);
    for (std::size_t i = 0; i < n_; ++i) y[i] = 0.5 * (y[i] + sign * bt[i]);
  }

  std::vector<double> row_sums() const {
    std::vector<double> s(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      detail::CompensatedSum acc;
      for (double v : row(i)) acc.add(v);
      s[i] = acc.value();
    }
    return s;
  }

  std::vector<double> column_sums() const {
    std::vector<detail::CompensatedSum> acc(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) acc[j].add(data_[i * n_ + j]);
    std::vector<double> s(n_);
    for (std::size_t j = 0; j < n_; ++j) s[j] = acc[j].value();
    return s;
  }

  /// max_j |column sum j - 1|
  double column_sum_deviation() const {
    double worst = 0.0;
    for (double s : column_sums()) worst = std::max(worst, std::abs(s - 1.0));
    return worst;
  }

  /// max_i of (1/2) sum_j |b_{i+1,j} - b_{i,j}|
  double max_adjacent_row_tv() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      double tv = 0.0;
      const auto a = row(i), b = row(i + 1);
      for (std::size_t j = 0; j < n_; ++j) tv += std::abs(b[j] - a[j]);
      worst = std::max(worst, 0.5 * tv);
    }
    return worst;
  }

 private:
  static constexpr std::size_t kColumnBlock = 256;
  void check(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("GridKernel: vector length must equal n");
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Dense B(n); rows are independent and built in parallel.
inline GridKernel build_kernel(std::size_t n, const KernelOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("build_kernel: n must be positive");
  std::vector<double> data(n * n);
  parallel_chunks(n, opt.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> cdf(n + 1);
    for (std::size_t i = begin; i < end; ++i) kernel_row(n, i + 1, {data.data() + i * n, n}, cdf, opt);
  });
  return GridKernel(n, std::move(data));
}

namespace detail {

// sign = +1 for S = (B + B^T)/2, -1 for D = (B - B^T)/2. Rows regenerated on
// the fly; memory O(n) per chunk.
inline void matrix_free_split_apply(std::size_t n, std::span<const double> x, std::span<double> y, double sign,
                                    const KernelOptions& opt) {
  if (x.size() != n || y.size() != n) throw std::invalid_argument("matrix-free apply: vector length must equal n");
  const unsigned chunks = chunk_count(n, opt.threads);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(n, 0.0));
  parallel_chunks(n, opt.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> row(n), cdf(n + 1);
    double* acc = partial[c].data();
    for (std::size_t i = begin; i < end; ++i) {
      kernel_row(n, i + 1, row, cdf, opt);
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += row[j] * x[j];
      acc[i] += dot;
      const double xi = sign * x[i];
      for (std::size_t j = 0; j < n; ++j) acc[j] += xi * row[j];
    }
  });
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& p : partial)
    for (std::size_t j = 0; j < n; ++j) y[j] += p[j];
  for (double& v : y) v *= 0.5;
}

}  // namespace detail

/// S v with S = (B + B^T)/2, without forming B.
inline std::vector<double> apply_sym(std::size_t n, std::span<const double> v, const KernelOptions& opt = {}) {
  std::vector<double> y(n);
  detail::matrix_free_split_apply(n, v, y, +1.0, opt);
  return y;
}

/// D v with D = (B - B^T)/2, without forming B.
inline std::vector<double> apply_skew(std::size_t n, std::span<const double> v, const KernelOptions& opt = {}) {
  std::vector<double> y(n);
  detail::matrix_free_split_apply(n, v, y, -1.0, opt);
  return y;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_GRID_KERNEL_HPP
