#ifndef SHUFFLE_SPECTRA_IDEAL_HPP
#define SHUFFLE_SPECTRA_IDEAL_HPP

// Idealized one-round motion of a single card under CCRR: a card starting at
// b in [0,1] and reinserted at u lands (asymptotically) at G_b(u).
//
//   G_b(u) = e^{1-b} u                               for u <= u0(b)
//          = exp(e^{-b}(1-u)) - (1-u) e^{1-b}         for u >  u0(b)
//   u0(b)  = 1 - (1-b) e^b

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace shuffle_spectra {

enum class Side { Left, Right };

namespace detail {

inline void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0,1]");
}

}  // namespace detail

/// Breakpoint of G_b.
inline double u0(double b) {
  detail::check_unit(b, "u0: b");
  return 1.0 - (1.0 - b) * std::exp(b);
}

/**
 * G_b for a fixed b with the exponentials hoisted. This is the hot object of
 * kernel construction: a row of B(n) is n+1 inversions of one IdealMap.
 */
class IdealMap {
 public:
  explicit IdealMap(double b) : b_(b) {
    detail::check_unit(b, "IdealMap: b");
    slope_ = std::exp(1.0 - b);
    decay_ = std::exp(-b);
    break_ = 1.0 - (1.0 - b) * std::exp(b);
  }

  double b() const noexcept { return b_; }
  double breakpoint() const noexcept { return break_; }
  double breakpoint_value() const noexcept { return slope_ * break_; }

  double operator()(double u) const noexcept {
    if (u <= break_) return slope_ * u;
    return std::exp(decay_ * (1.0 - u)) - (1.0 - u) * slope_;
  }

  /// Equivalent closed form min(e^{1-b}u, exp(e^{-b}(1-u)) - (1-u)e^{1-b}).
  double min_form(double u) const noexcept {
    return std::min(slope_ * u, std::exp(decay_ * (1.0 - u)) - (1.0 - u) * slope_);
  }

  /// Derivative; at the breakpoint `side` selects the one-sided limit.
  double derivative(double u, Side side = Side::Right) const noexcept {
    const bool linear = u < break_ || (u == break_ && side == Side::Left);
    if (linear) return slope_;
    return slope_ - decay_ * std::exp(decay_ * (1.0 - u));
  }

  /**
   * u with |G_b(u) - z| <= tol. Newton from `start` with the branch-aware
   * derivative; falls back to bisection after `max_newton` steps or if an
   * iterate leaves [0,1] or meets a non-positive slope.
   */
  double inverse(double z, double tol = 1e-12, double start = 0.0, int max_newton = 100) const {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    double u = std::clamp(start, 0.0, 1.0);
    double s = (*this)(u) - z;
    for (int it = 0; std::abs(s) > tol; ++it) {
      const double slope = u <= break_ ? slope_ : slope_ - decay_ * std::exp(decay_ * (1.0 - u));
      if (it >= max_newton || !(slope > 0.0)) return bisect(z, tol);
      u -= s / slope;
      if (!(u >= 0.0 && u <= 1.0)) return bisect(z, tol);
      s = (*this)(u) - z;
    }
    return u;
  }

 private:
  double bisect(double z, double tol) const {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double s = (*this)(mid) - z;
      if (std::abs(s) <= tol) return mid;
      if (mid == lo || mid == hi) break;  // interval is down to adjacent doubles
      (s < 0.0 ? lo : hi) = mid;
    }
    throw numeric_error("G inverse did not reach tolerance " + std::to_string(tol) + " at z=" + std::to_string(z));
  }

  double b_;
  double slope_;  // e^{1-b}
  double decay_;  // e^{-b}
  double break_;  // u0(b)
};

inline double g(double b, double u) {
  detail::check_unit(u, "g: u");
  return IdealMap(b)(u);
}

inline double g_prime(double b, double u, Side side = Side::Right) {
  detail::check_unit(u, "g_prime: u");
  return IdealMap(b).derivative(u, side);
}

inline double g_inverse(double b, double z, double tol = 1e-12, double start = 0.0) {
  detail::check_unit(z, "g_inverse: z");
  return IdealMap(b).inverse(z, tol, start);
}

// ---------------------------------------------------------------------------
// Y-chain: Y_0 = a = k/n, Y_{t+1} = Y_t + 1/n with probability Y_t.

struct YMoments {
  double mean = 0.0;
  double variance = 0.0;        // exact, from the one-step variance recursion
  double variance_bound = 0.0;  // 2 / (5n)
};

namespace detail {

inline void check_ychain(std::size_t n, std::size_t k, std::size_t t) {
  if (n == 0) throw std::invalid_argument("Y chain: n must be positive");
  if (k < 1 || k > n) throw std::invalid_argument("Y chain: start a = k/n needs 1 <= k <= n");
  if (t > n - k) throw std::invalid_argument("Y chain: t must not exceed n(1-a)");
}

}  // namespace detail

/// Moments of Y_t for start a = k/n.
inline YMoments y_moments(std::size_t n, std::size_t k, std::size_t t) {
  detail::check_ychain(n, k, t);
  const double nn = static_cast<double>(n);
  const double a = static_cast<double>(k) / nn;
  const double c = 1.0 + 1.0 / nn;
  const double inv_n2 = 1.0 / (nn * nn);
  double v = 0.0;
  double ct = 1.0;  // c^s
  for (std::size_t s = 0; s < t; ++s) {
    const double m = ct * a;
    v = (c * c - inv_n2) * v + m * (1.0 - m) * inv_n2;
    ct *= c;
  }
  return {ct * a, v, 0.4 / nn};
}

/// Exact law of Y_t; entry j-1 is P(Y_t = j/n). O(n t), capped at n <= 500.
inline std::vector<double> y_distribution(std::size_t n, std::size_t k, std::size_t t) {
  detail::check_ychain(n, k, t);
  if (n > 500) throw capability_error("y_distribution is limited to n <= 500; use y_moments");
  const double nn = static_cast<double>(n);
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[k - 1] = 1.0;
  for (std::size_t s = 0; s < t; ++s) {
    std::fill(next.begin(), next.end(), 0.0);
    // Support after s steps is {k, ..., k+s}.
    for (std::size_t j = k; j <= k + s; ++j) {
      const double up = static_cast<double>(j) / nn;
      next[j - 1] += p[j - 1] * (1.0 - up);
      if (j < n) next[j] += p[j - 1] * up;
    }
    p.swap(next);
  }
  return p;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_IDEAL_HPP
