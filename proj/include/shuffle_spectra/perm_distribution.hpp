#ifndef SHUFFLE_SPECTRA_PERM_DISTRIBUTION_HPP
#define SHUFFLE_SPECTRA_PERM_DISTRIBUTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace shuffle_spectra {

inline constexpr std::size_t kMaxExactDeck = 7;

/// Deck order for exact work: order[p] is the 1-based card at position p+1.
using SmallOrder = std::array<std::uint8_t, kMaxExactDeck>;

using int128 = __int128;

inline std::string to_string(int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

inline std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Lehmer-code rank of an order in [0, n!).
inline std::size_t lehmer_rank(const SmallOrder& order, std::size_t n) {
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller += order[j] < order[i];
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

inline SmallOrder lehmer_unrank(std::size_t rank, std::size_t n) {
  std::array<std::size_t, kMaxExactDeck> digits{};
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = rank % (n - i);
    rank /= (n - i);
  }
  std::vector<std::uint8_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::uint8_t{1});
  SmallOrder out{};
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = pool[digits[i]];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digits[i]));
  }
  return out;
}

inline SmallOrder identity_order(std::size_t n) {
  if (n > kMaxExactDeck) throw capability_error("small orders hold at most " + std::to_string(kMaxExactDeck) + " cards");
  SmallOrder o{};
  for (std::size_t i = 0; i < n; ++i) o[i] = static_cast<std::uint8_t>(i + 1);
  return o;
}

/// Exact rational p/q with q > 0, reduced.
struct Rational {
  int128 num = 0;
  int128 den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    const int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline Rational make_rational(int128 num, int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

/**
 * Measure on S_n (n <= 7) indexed by Lehmer rank. With Weight = double the
 * entries are probabilities and `denominator` stays 1; with Weight = int128
 * the entries are integer counts over a common `denominator`, which makes
 * every probability and TV distance exact.
 */
template <class Weight>
class PermMeasure {
 public:
  static constexpr bool kExact = !std::is_floating_point_v<Weight>;

  PermMeasure() = default;

  /// Point mass at `order`.
  static PermMeasure point_mass(std::size_t n, const SmallOrder& order) {
    PermMeasure m(n);
    m.weight_[lehmer_rank(order, n)] = Weight{1};
    return m;
  }

  static PermMeasure point_mass(std::size_t n) { return point_mass(n, identity_order(n)); }

  static PermMeasure uniform(std::size_t n) {
    PermMeasure m(n);
    std::fill(m.weight_.begin(), m.weight_.end(), Weight{1});
    if constexpr (kExact) {
      m.denominator_ = static_cast<Weight>(factorial(n));
    } else {
      for (auto& w : m.weight_) w /= static_cast<double>(factorial(n));
    }
    return m;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t states() const noexcept { return weight_.size(); }
  std::span<const Weight> weights() const noexcept { return weight_; }
  Weight weight(std::size_t rank) const { return weight_.at(rank); }
  Weight denominator() const noexcept { return denominator_; }

  double probability(std::size_t rank) const {
    if constexpr (kExact)
      return static_cast<double>(weight_.at(rank)) / static_cast<double>(denominator_);
    else
      return weight_.at(rank);
  }

  double total() const {
    if constexpr (kExact) {
      Weight s = 0;
      for (auto w : weight_) s += w;
      return static_cast<double>(s) / static_cast<double>(denominator_);
    } else {
      double s = 0.0;
      for (double w : weight_) s += w;
      return s;
    }
  }

  /// New empty measure of the same size, for accumulating a pushforward.
  PermMeasure empty_like() const { return PermMeasure(n_); }

  void add(std::size_t rank, Weight w) { weight_[rank] += w; }
  void set_denominator(Weight d) { denominator_ = d; }

  friend bool operator==(const PermMeasure&, const PermMeasure&) = default;

  explicit PermMeasure(std::size_t n) : n_(n) {
    if (n == 0 || n > kMaxExactDeck)
      throw capability_error("exact distributions on S_n support 1 <= n <= " + std::to_string(kMaxExactDeck));
    weight_.assign(factorial(n), Weight{0});
  }

 private:
  std::size_t n_ = 0;
  std::vector<Weight> weight_;
  Weight denominator_{1};
};

using PermDistribution = PermMeasure<double>;
using ExactPermDistribution = PermMeasure<int128>;

/// (1/2) sum |p - 1/n!|
inline double tv_to_uniform(const PermDistribution& d) {
  const double u = 1.0 / static_cast<double>(d.states());
  double s = 0.0;
  for (double p : d.weights()) s += std::abs(p - u);
  return 0.5 * s;
}

/// Exact TV to uniform: (1/2) sum |n! c - D| / (n! D).
inline Rational tv_to_uniform(const ExactPermDistribution& d) {
  const int128 f = static_cast<int128>(d.states());
  int128 scaled_den = 0;
  if (__builtin_mul_overflow(f, d.denominator(), &scaled_den)) throw capability_error("exact TV overflows 128 bits");
  int128 s = 0;
  for (int128 c : d.weights()) {
    int128 fc = 0;
    if (__builtin_mul_overflow(f, c, &fc)) throw capability_error("exact TV overflows 128 bits");
    const int128 diff = fc > d.denominator() ? fc - d.denominator() : d.denominator() - fc;
    if (__builtin_add_overflow(s, diff, &s)) throw capability_error("exact TV overflows 128 bits");
  }
  int128 den2 = 0;
  if (__builtin_mul_overflow(scaled_den, int128{2}, &den2)) throw capability_error("exact TV overflows 128 bits");
  return make_rational(s, den2);
}

inline double tv_to_uniform_value(const ExactPermDistribution& d) { return tv_to_uniform(d).to_double(); }

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_PERM_DISTRIBUTION_HPP
