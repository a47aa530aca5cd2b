#ifndef SHUFFLE_SPECTRA_SINGLE_CARD_HPP
#define SHUFFLE_SPECTRA_SINGLE_CARD_HPP

// Monte Carlo view of one CCRR round from the sorted deck, tracking one card:
// where it was reinserted (U) and where it ended (Z), both on the grid {i/n}.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "deck.hpp"
#include "ideal.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "shuffles.hpp"

namespace shuffle_spectra {

/// Conditional statistics of Z over reinsertion slots U in (lo, hi].
struct SlotBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mean_z = 0.0;
  double mean_g = 0.0;          // mean of G_a(U) over the bucket's samples
  double mean_residual = 0.0;   // mean of Z - G_a(U)
  double var_residual = 0.0;    // sample variance of Z - G_a(U); estimates Var(Z | U)
  double se_mean = 0.0;         // standard error of mean_residual
  double se_var = 0.0;          // normal-theory standard error of var_residual
};

struct SingleCardStats {
  std::size_t n = 0;
  std::size_t card = 0;  // a = card / n
  std::size_t reps = 0;
  std::vector<double> row;  // empirical law of Z: row[z-1] = P(Z = z/n)
  std::vector<SlotBucket> buckets;

  double a() const { return static_cast<double>(card) / static_cast<double>(n); }
};

struct SingleCardOptions {
  std::size_t buckets = 50;
  std::uint64_t seed = 0x5eed5eed5eedULL;
  unsigned threads = 1;
};

/**
 * reps independent CCRR rounds from the sorted deck of n cards; replicate r
 * draws from RngStream(seed, r), so results do not depend on the thread count.
 */
template <class AnyDeck = FastDeck>
SingleCardStats empirical_single_card(std::size_t n, std::size_t card, std::size_t reps,
                                      const SingleCardOptions& opt = {}) {
  if (n == 0 || card < 1 || card > n) throw std::invalid_argument("empirical_single_card: need 1 <= card <= n");
  if (reps == 0) throw std::invalid_argument("empirical_single_card: reps must be positive");
  if (opt.buckets == 0) throw std::invalid_argument("empirical_single_card: need at least one bucket");
  std::vector<Position> slot(reps), landing(reps);
  parallel_chunks(reps, opt.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(opt.seed, r);
      AnyDeck deck(n);
      const RoundTrace trace = run_round(deck, ShuffleKind::CCRR, rng);
      slot[r] = trace.slots[card - 1];  // sorted start: step k handles card k
      landing[r] = deck.position_of(card);
    }
  });

  SingleCardStats out;
  out.n = n;
  out.card = card;
  out.reps = reps;
  out.row.assign(n, 0.0);
  const double nn = static_cast<double>(n);
  const IdealMap map(static_cast<double>(card) / nn);
  const std::size_t nb = opt.buckets;
  struct Acc {
    std::size_t count = 0;
    double z = 0.0, g = 0.0, d = 0.0, d2 = 0.0;
  };
  std::vector<Acc> acc(nb);
  for (std::size_t r = 0; r < reps; ++r) {
    out.row[landing[r] - 1] += 1.0;
    const double u = static_cast<double>(slot[r]) / nn;
    const double z = static_cast<double>(landing[r]) / nn;
    // Bucket b covers (b/nb, (b+1)/nb].
    std::size_t b = static_cast<std::size_t>(std::ceil(u * static_cast<double>(nb))) - 1;
    if (b >= nb) b = nb - 1;
    const double gu = map(u);
    auto& a = acc[b];
    ++a.count;
    a.z += z;
    a.g += gu;
    a.d += z - gu;
    a.d2 += (z - gu) * (z - gu);
  }
  for (double& p : out.row) p /= static_cast<double>(reps);
  out.buckets.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    auto& o = out.buckets[b];
    o.lo = static_cast<double>(b) / static_cast<double>(nb);
    o.hi = static_cast<double>(b + 1) / static_cast<double>(nb);
    const auto& a = acc[b];
    o.count = a.count;
    if (a.count == 0) continue;
    const double c = static_cast<double>(a.count);
    o.mean_z = a.z / c;
    o.mean_g = a.g / c;
    o.mean_residual = a.d / c;
    if (a.count > 1) {
      o.var_residual = std::max(0.0, (a.d2 - c * o.mean_residual * o.mean_residual) / (c - 1.0));
      o.se_mean = std::sqrt(o.var_residual / c);
      o.se_var = o.var_residual * std::sqrt(2.0 / (c - 1.0));
    }
  }
  return out;
}

/// Bucket-level check of E[Z|U=u] in (1 +- 2/n) G_a(u), with `sigmas` standard errors of slack.
inline bool conditional_mean_ok(const SlotBucket& b, std::size_t n, double sigmas = 3.0) {
  if (b.count < 2) return true;
  return std::abs(b.mean_residual) <= 2.0 / static_cast<double>(n) * b.mean_g + sigmas * b.se_mean;
}

/// Bucket-level check of Var(Z|U=u) < 9/n, with `sigmas` standard errors of slack.
inline bool conditional_variance_ok(const SlotBucket& b, std::size_t n, double sigmas = 3.0) {
  if (b.count < 2) return true;
  return b.var_residual < 9.0 / static_cast<double>(n) + sigmas * b.se_var;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_SINGLE_CARD_HPP
