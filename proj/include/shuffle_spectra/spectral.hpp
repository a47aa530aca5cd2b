#ifndef SHUFFLE_SPECTRA_SPECTRAL_HPP
#define SHUFFLE_SPECTRA_SPECTRAL_HPP

// Power-iteration eigen estimates for B(n) and its symmetric / skew parts,
// with residual certificates.
//
// For a normal operator C (S and D here), a unit vector v and scalar k with
// ||Cv - kv|| < eps prove that C has an eigenvalue within eps of k. B is not
// normal, so its residual is reported but certifies nothing.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "grid_kernel.hpp"
#include "rng.hpp"

namespace shuffle_spectra {

using cplx = std::complex<double>;

enum class OperatorTag { S, D, B };

inline std::string_view to_string(OperatorTag t) {
  switch (t) {
    case OperatorTag::S: return "S";
    case OperatorTag::D: return "D";
    case OperatorTag::B: return "B";
  }
  return "?";
}

/// Vector: plain 2-norm of the n entries. L2: norm of the step-function
/// extension on [0,1], i.e. the 2-norm divided by sqrt(n).
enum class NormConvention { Vector, L2 };

inline std::string_view to_string(NormConvention c) { return c == NormConvention::Vector ? "vector" : "L2"; }

template <class T>
double norm(std::span<const T> v, NormConvention c = NormConvention::Vector) {
  double s = 0.0;
  for (const T& x : v) s += std::norm(x);
  s = std::sqrt(s);
  return c == NormConvention::Vector ? s : s / std::sqrt(static_cast<double>(v.size()));
}

template <class T>
double norm(const std::vector<T>& v, NormConvention c = NormConvention::Vector) {
  return norm(std::span<const T>(v), c);
}

/// Matrix-free real operator on R^n.
class LinearOperator {
 public:
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator(std::size_t n, Apply apply) : n_(n), apply_(std::move(apply)) {}

  std::size_t size() const noexcept { return n_; }

  void operator()(std::span<const double> x, std::span<double> y) const { apply_(x, y); }

  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> y(n_);
    apply_(x, y);
    return y;
  }

  /// Real operator applied to a complex vector, part by part.
  std::vector<cplx> operator()(std::span<const cplx> x) const {
    std::vector<double> re(n_), im(n_), are(n_), aim(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      re[i] = x[i].real();
      im[i] = x[i].imag();
    }
    apply_(re, are);
    apply_(im, aim);
    std::vector<cplx> y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = {are[i], aim[i]};
    return y;
  }

 private:
  std::size_t n_;
  Apply apply_;
};

/// B, borrowing `k`.
inline LinearOperator kernel_operator(const GridKernel& k, unsigned threads = 1) {
  return {k.size(), [&k, threads](std::span<const double> x, std::span<double> y) { k.apply(x, y, threads); }};
}

/// B^T, borrowing `k`.
inline LinearOperator transpose_operator(const GridKernel& k, unsigned threads = 1) {
  return {k.size(),
          [&k, threads](std::span<const double> x, std::span<double> y) { k.apply_transpose(x, y, threads); }};
}

namespace detail {

inline LinearOperator split_operator(const GridKernel& k, double sign, unsigned threads) {
  return {k.size(), [&k, sign, threads](std::span<const double> x, std::span<double> y) {
            k.apply_split(x, y, sign, threads);
          }};
}

}  // namespace detail

/// S = (B + B^T)/2 over a dense kernel.
inline LinearOperator sym_operator(const GridKernel& k, unsigned threads = 1) {
  return detail::split_operator(k, +1.0, threads);
}

/// D = (B - B^T)/2 over a dense kernel.
inline LinearOperator skew_operator(const GridKernel& k, unsigned threads = 1) {
  return detail::split_operator(k, -1.0, threads);
}

/// S of B(n) with rows regenerated per apply; O(n) memory, O(n^2) Newton solves per apply.
inline LinearOperator matrix_free_sym_operator(std::size_t n, KernelOptions opt = {}) {
  return {n, [n, opt](std::span<const double> x, std::span<double> y) {
            detail::matrix_free_split_apply(n, x, y, +1.0, opt);
          }};
}

inline LinearOperator matrix_free_skew_operator(std::size_t n, KernelOptions opt = {}) {
  return {n, [n, opt](std::span<const double> x, std::span<double> y) {
            detail::matrix_free_split_apply(n, x, y, -1.0, opt);
          }};
}

/// Dense row-major operator, owning its entries.
inline LinearOperator dense_operator(std::size_t n, std::vector<double> entries) {
  if (entries.size() != n * n) throw std::invalid_argument("dense_operator: entry count must be n*n");
  return {n, [n, m = std::move(entries)](std::span<const double> x, std::span<double> y) {
            for (std::size_t i = 0; i < n; ++i) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += m[i * n + j] * x[j];
              y[i] = acc;
            }
          }};
}

struct EigenEstimate {
  OperatorTag op = OperatorTag::S;
  std::size_t n = 0;
  cplx value{};
  std::vector<cplx> vector;  // unit norm in `convention`
  NormConvention convention = NormConvention::L2;
  double residual = 0.0;  // ||Op v - value v|| / ||v||, the same in either convention
  std::size_t iterations = 0;
  bool converged = false;
  bool certified = false;     // residual bounds the distance to a true eigenvalue
  bool complex_pair = false;  // B only: dominant remaining eigenvalues form a conjugate pair
  std::vector<double> history;  // eigenvalue estimate after each iteration

  /// Real parts of `vector`, for operators whose eigenvector is real.
  std::vector<double> real_vector() const {
    std::vector<double> r(vector.size());
    for (std::size_t i = 0; i < vector.size(); ++i) r[i] = vector[i].real();
    return r;
  }
};

struct PowerOptions {
  double tol = 1e-10;              // relative change in the estimate
  std::size_t stable_iterations = 5;  // consecutive iterations below tol
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0x51ec7a1ULL;  // starting vector
  NormConvention convention = NormConvention::L2;
};

/// ||op(v) - kappa v|| / ||v||.
template <class T>
double residual(const LinearOperator& op, std::span<const T> v, cplx kappa) {
  if (v.size() != op.size()) throw std::invalid_argument("residual: vector length must equal operator size");
  const double nv = norm(v);
  if (!(nv > 0.0)) throw std::invalid_argument("residual: zero vector");
  const auto av = op(v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(cplx(av[i]) - kappa * cplx(v[i]));
  return std::sqrt(s) / nv;
}

template <class T>
double residual(const LinearOperator& op, const std::vector<T>& v, cplx kappa) {
  return residual(op, std::span<const T>(v), kappa);
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double scale_to_unit(std::vector<double>& v) {
  const double nv = norm(v);
  if (nv > 0.0)
    for (double& x : v) x /= nv;
  return nv;
}

inline void remove_mean(std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

inline std::vector<double> random_start(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform() - 0.5;
  return v;
}

// Tracks "relative change < tol for `needed` consecutive iterations".
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(double tol, std::size_t needed) : tol_(tol), needed_(needed) {}
  bool update(double estimate) {
    if (has_last_ && std::abs(estimate - last_) <= tol_ * std::max(std::abs(estimate), 1e-300))
      ++streak_;
    else
      streak_ = 0;
    last_ = estimate;
    has_last_ = true;
    return streak_ >= needed_;
  }

 private:
  double tol_;
  std::size_t needed_;
  double last_ = 0.0;
  bool has_last_ = false;
  std::size_t streak_ = 0;
};

template <class T>
std::vector<cplx> to_complex_scaled(const std::vector<T>& v, NormConvention c) {
  std::vector<cplx> out(v.begin(), v.end());
  const double scale = c == NormConvention::L2 ? std::sqrt(static_cast<double>(v.size())) : 1.0;
  for (auto& x : out) x *= scale;
  return out;
}

}  // namespace detail

/**
 * Second eigenpair of a symmetric operator whose top eigenvector is the
 * all-ones vector: power iteration on the orthogonal complement of 1,
 * re-projected every step.
 */
inline EigenEstimate second_eig_sym(const LinearOperator& op, const PowerOptions& opt = {}) {
  const std::size_t n = op.size();
  if (n < 2) throw std::invalid_argument("second_eig_sym: needs n >= 2");
  std::vector<double> x = detail::random_start(n, opt.seed), y(n);
  detail::remove_mean(x);
  detail::scale_to_unit(x);
  detail::ConvergenceMonitor monitor(opt.tol, opt.stable_iterations);
  EigenEstimate est;
  est.op = OperatorTag::S;
  est.n = n;
  double lambda = 0.0;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    op(x, y);
    detail::remove_mean(y);
    lambda = detail::dot(x, y);
    est.history.push_back(lambda);
    est.iterations = it;
    const double ny = detail::scale_to_unit(y);
    if (ny == 0.0) {  // x spans a null direction; lambda = 0 exactly
      est.converged = true;
      break;
    }
    x.swap(y);
    if (monitor.update(lambda)) {
      est.converged = true;
      break;
    }
  }
  est.value = lambda;
  est.convention = opt.convention;
  est.residual = residual(op, x, lambda);
  est.vector = detail::to_complex_scaled(x, opt.convention);
  est.certified = true;
  return est;
}

/**
 * ||D||_{2,2} for skew-symmetric D, via power iteration on the positive
 * semidefinite -D^2. With kappa^2 the top eigenvalue and x its unit
 * eigenvector, w = Dx / kappa gives D(x - iw) = i kappa (x - iw), so the
 * returned eigenpair of D is (i kappa, (x - iw)/sqrt 2).
 */
inline EigenEstimate skew_norm(const LinearOperator& op, const PowerOptions& opt = {}) {
  const std::size_t n = op.size();
  if (n < 1) throw std::invalid_argument("skew_norm: empty operator");
  std::vector<double> x = detail::random_start(n, opt.seed), dx(n), y(n);
  detail::scale_to_unit(x);
  detail::ConvergenceMonitor monitor(opt.tol, opt.stable_iterations);
  EigenEstimate est;
  est.op = OperatorTag::D;
  est.n = n;
  double mu = 0.0;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    op(x, dx);
    op(dx, y);
    for (double& v : y) v = -v;
    mu = detail::dot(x, y);
    est.history.push_back(std::sqrt(std::max(mu, 0.0)));
    est.iterations = it;
    const double ny = detail::scale_to_unit(y);
    if (ny == 0.0) {
      est.converged = true;
      break;
    }
    x.swap(y);
    if (monitor.update(mu)) {
      est.converged = true;
      break;
    }
  }
  const double kappa = std::sqrt(std::max(mu, 0.0));
  est.value = cplx(0.0, kappa);
  est.convention = opt.convention;
  est.certified = true;
  if (kappa == 0.0) {
    est.residual = residual(op, x, 0.0);
    est.vector = detail::to_complex_scaled(x, opt.convention);
    return est;
  }
  op(x, dx);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = cplx(x[i], -dx[i] / kappa);
  const double nv = norm(v);
  for (auto& c : v) c /= nv;
  est.residual = residual(op, v, est.value);
  if (opt.convention == NormConvention::L2)
    for (auto& c : v) c *= std::sqrt(static_cast<double>(n));
  est.vector = std::move(v);
  return est;
}

/**
 * Left Perron vector of B (B^T pi = pi, sum pi = 1) by power iteration on B^T
 * from the uniform vector.
 */
inline std::vector<double> stationary_vector(const LinearOperator& transpose, double tol = 1e-15,
                                             std::size_t max_iterations = 10000) {
  const std::size_t n = transpose.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    transpose(pi, next);
    const double s = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= s;
      change = std::max(change, std::abs(next[i] - pi[i]));
    }
    pi.swap(next);
    if (change <= tol) break;
  }
  return pi;
}

/// Residual above which a settled real estimate of B's eigenvalue is re-examined.
inline constexpr double kRealResidualCap = 1e-6;

/**
 * Second eigenvalue of the row-stochastic, non-normal B. The eigenvalue 1 is
 * deflated with P x = x - 1 (pi . x), where pi is the left stationary vector,
 * and the power iteration runs on B P. If the estimate fails to settle, or
 * settles with a residual above kRealResidualCap (a Rayleigh quotient stuck
 * at Re mu of a rotating pair does that), a two-step fit
 * x2 = alpha x1 + beta x0 decides whether the dominant remaining eigenvalues
 * are a complex pair; the candidate with the smaller residual is kept.
 */
inline EigenEstimate second_eig_b(const LinearOperator& op, const LinearOperator& transpose,
                                  const PowerOptions& opt = {}) {
  const std::size_t n = op.size();
  if (n < 2) throw std::invalid_argument("second_eig_b: B(1) has no second eigenvalue");
  const std::vector<double> pi = stationary_vector(transpose);
  auto deflate = [&pi](std::vector<double>& v) {
    const double c = detail::dot(pi, v);
    for (double& x : v) x -= c;
  };
  std::vector<double> x = detail::random_start(n, opt.seed), y(n);
  deflate(x);
  detail::scale_to_unit(x);
  detail::ConvergenceMonitor monitor(opt.tol, opt.stable_iterations);
  EigenEstimate est;
  est.op = OperatorTag::B;
  est.n = n;
  double lambda = 0.0;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    op(x, y);
    deflate(y);
    lambda = detail::dot(x, y);
    est.history.push_back(lambda);
    est.iterations = it;
    const double ny = detail::scale_to_unit(y);
    if (ny == 0.0) {
      est.converged = true;
      break;
    }
    x.swap(y);
    if (monitor.update(lambda)) {
      est.converged = true;
      break;
    }
  }
  est.convention = opt.convention;
  const double real_residual = residual(op, x, lambda);
  if (est.converged && real_residual <= kRealResidualCap) {
    est.value = lambda;
    est.residual = real_residual;
    est.vector = detail::to_complex_scaled(x, opt.convention);
    return est;
  }
  // Two-step Rayleigh fit on x0, x1 = BPx0, x2 = BPx1.
  std::vector<double> x1(n), x2(n);
  op(x, x1);
  deflate(x1);
  op(x1, x2);
  deflate(x2);
  const double a11 = detail::dot(x1, x1), a12 = detail::dot(x1, x), a22 = detail::dot(x, x);
  const double b1 = detail::dot(x1, x2), b2 = detail::dot(x, x2);
  const double det = a11 * a22 - a12 * a12;
  const double alpha = (b1 * a22 - b2 * a12) / det;
  const double beta = (a11 * b2 - a12 * b1) / det;
  const double disc = alpha * alpha + 4.0 * beta;
  EigenEstimate fit = est;
  if (det > 0.0 && disc < 0.0) {
    fit.complex_pair = true;
    fit.value = cplx(0.5 * alpha, 0.5 * std::sqrt(-disc));
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = cplx(x1[i]) - std::conj(fit.value) * x[i];
    const double nv = norm(v);
    for (auto& c : v) c /= nv;
    fit.residual = residual(op, v, fit.value);
    fit.vector = detail::to_complex_scaled(v, opt.convention);
  } else if (det > 0.0) {
    const double r1 = 0.5 * (alpha + std::sqrt(disc)), r2 = 0.5 * (alpha - std::sqrt(disc));
    fit.value = std::abs(r1) >= std::abs(r2) ? r1 : r2;
    fit.residual = residual(op, x, fit.value);
    fit.vector = detail::to_complex_scaled(x, opt.convention);
  } else {
    fit.residual = INFINITY;
  }
  est.value = lambda;
  est.residual = real_residual;
  est.vector = detail::to_complex_scaled(x, opt.convention);
  if (fit.residual < est.residual) {
    fit.converged = fit.residual <= kRealResidualCap;
    return fit;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Interpolate / smooth / inspect grid functions.

/**
 * Piecewise-linear resampling from the grid {i/n} onto {j/m}, m >= n. Targets
 * left of 1/n use the first segment's line (the segment index is clamped).
 */
template <class T>
std::vector<T> interpolate(std::span<const T> v, std::size_t m) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("interpolate: empty input");
  if (m < n) throw std::invalid_argument("interpolate: target size must be >= source size");
  std::vector<T> out(m);
  if (n == 1) {
    std::fill(out.begin(), out.end(), v[0]);
    return out;
  }
  for (std::size_t j = 1; j <= m; ++j) {
    // Target j/m sits at node coordinate t = j n / m (node i at t = i).
    const std::size_t num = j * n;
    std::size_t i = num / m;
    std::size_t rem = num % m;
    if (i >= n) {  // t == n: right endpoint
      i = n - 1;
      rem = m;
    }
    double frac = static_cast<double>(rem) / static_cast<double>(m);
    if (i == 0) {  // t < 1: extend the first segment
      i = 1;
      frac = static_cast<double>(num) / static_cast<double>(m) - 1.0;
    }
    out[j - 1] = (1.0 - frac) * v[i - 1] + frac * v[i];
  }
  return out;
}

template <class T>
std::vector<T> interpolate(const std::vector<T>& v, std::size_t m) {
  return interpolate(std::span<const T>(v), m);
}

/// Replaces entries 1..k-1 (1-based) by the line through entries k and k+1.
template <class T>
std::vector<T> smooth_boundary(std::vector<T> v, std::size_t k) {
  if (k < 1 || k + 1 >= v.size()) throw std::invalid_argument("smooth_boundary: needs 1 <= k and k + 1 < n");
  const T anchor = v[k];  // entry k+1
  const T step = v[k] - v[k - 1];
  for (std::size_t j = 1; j < k; ++j) v[j - 1] = anchor - static_cast<double>(k + 1 - j) * step;
  return v;
}

struct OscillationStats {
  double span = 0.0;       // max_x v(x) - min_x v(x); for complex v the diameter max |v_i - v_j|
  double max_slope = 0.0;  // n max_i |v_{i+1} - v_i|
};

inline OscillationStats oscillation_stats(std::span<const double> v) {
  OscillationStats s;
  if (v.empty()) return s;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.span = *hi - *lo;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s.max_slope = std::max(s.max_slope, std::abs(v[i + 1] - v[i]));
  s.max_slope *= static_cast<double>(v.size());
  return s;
}

inline OscillationStats oscillation_stats(std::span<const cplx> v) {
  OscillationStats s;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) s.span = std::max(s.span, std::abs(v[i] - v[j]));
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s.max_slope = std::max(s.max_slope, std::abs(v[i + 1] - v[i]));
  s.max_slope *= static_cast<double>(v.size());
  return s;
}

template <class T>
OscillationStats oscillation_stats(const std::vector<T>& v) {
  return oscillation_stats(std::span<const T>(v));
}

/// Result of transplanting a coarse eigenvector onto a finer operator.
struct TransplantCheck {
  std::size_t base_n = 0;
  std::size_t target_n = 0;
  std::size_t smoothing = 0;
  cplx kappa{};
  double residual = 0.0;  // relative; equals the L2[0,1] residual of the L2-normalized vector
  OscillationStats stats;
};

/**
 * Smooth the first `smoothing` entries of `base`, interpolate onto the
 * target grid of `target`, and measure ||target psi - kappa psi|| / ||psi||.
 */
template <class T>
TransplantCheck transplant_residual(const std::vector<T>& base, cplx kappa, std::size_t smoothing,
                                    const LinearOperator& target) {
  TransplantCheck out;
  out.base_n = base.size();
  out.target_n = target.size();
  out.smoothing = smoothing;
  out.kappa = kappa;
  const auto smoothed = smoothing > 1 ? smooth_boundary(base, smoothing) : base;
  out.stats = oscillation_stats(smoothed);
  const auto psi = interpolate(smoothed, target.size());
  out.residual = residual(target, psi, kappa);
  return out;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_SPECTRAL_HPP
