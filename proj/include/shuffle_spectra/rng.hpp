#ifndef SHUFFLE_SPECTRA_RNG_HPP
#define SHUFFLE_SPECTRA_RNG_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace shuffle_spectra {

namespace detail {

// Stafford's "Mix13" finalizer, as used by SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/**
 * Counter-based random stream keyed by (seed, stream id).
 *
 * Output k of a stream is mix64(key + (k + 1) * gamma), i.e. SplitMix64 with a
 * per-stream starting point and a per-stream odd increment. Both are derived
 * from (seed, stream) through independent hash rounds, so replicate r of a
 * Monte Carlo run can own RngStream(seed, r) and be reproduced in isolation.
 *
 * Satisfies std::uniform_random_bit_generator. Bounded draws use Lemire's
 * multiply-and-reject method so results do not depend on the standard
 * library's distribution implementations.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0x5eed5eed5eedULL, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {
    const std::uint64_t h = detail::mix64(seed ^ detail::mix64(stream + 0x9e3779b97f4a7c15ULL));
    state_ = detail::mix64(h + 0x632be59bd9b4e019ULL);
    gamma_ = detail::mix64(h ^ 0xd1b54a32d192ed03ULL) | 1ULL;  // must be odd
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += gamma_;
    return detail::mix64(state_);
  }

  /// Uniform integer on {1, ..., n}.
  std::uint64_t slot(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::slot: n must be positive");
    return below(n) + 1;
  }

  /// Uniform integer on {0, ..., bound - 1}.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_RNG_HPP
