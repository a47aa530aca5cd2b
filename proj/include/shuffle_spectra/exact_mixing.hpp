#ifndef SHUFFLE_SPECTRA_EXACT_MIXING_HPP
#define SHUFFLE_SPECTRA_EXACT_MIXING_HPP

// Exact laws on S_n for tiny decks.
//
// Every shuffle step here is a uniform choice among k outcomes, so a round is
// a product of n step operators, each costing O(n! k). CCRR is pushed as a
// convolution: a CCRR round from order x ends in x o R, where R is the law of
// one round from the sorted deck (the relabeling makes the round's action on
// positions independent of the current order).

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "grid_kernel.hpp"
#include "perm_distribution.hpp"
#include "shuffles.hpp"

namespace shuffle_spectra {

namespace detail {

inline void small_remove_insert(SmallOrder& o, std::uint8_t card, std::size_t slot) {
  std::size_t from = 0;
  while (o[from] != card) ++from;
  const std::size_t to = slot - 1;
  if (to < from)
    for (std::size_t p = from; p > to; --p) o[p] = o[p - 1];
  else
    for (std::size_t p = from; p < to; ++p) o[p] = o[p + 1];
  o[to] = card;
}

template <class Weight>
void scale_step(PermMeasure<Weight>& next, const PermMeasure<Weight>& prev, std::uint64_t outcomes) {
  if constexpr (PermMeasure<Weight>::kExact) {
    Weight d = 0;
    if (__builtin_mul_overflow(prev.denominator(), static_cast<Weight>(outcomes), &d))
      throw capability_error("exact distribution denominator overflows 128 bits");
    next.set_denominator(d);
  }
}

// One step with `outcomes` equally likely results; apply(order, k) mutates the
// order for outcome k in [0, outcomes).
template <class Weight, class Apply>
PermMeasure<Weight> push_step(const PermMeasure<Weight>& m, std::uint64_t outcomes, Apply&& apply) {
  const std::size_t n = m.n();
  PermMeasure<Weight> next = m.empty_like();
  scale_step(next, m, outcomes);
  for (std::size_t r = 0; r < m.states(); ++r) {
    const Weight w = m.weight(r);
    if (w == Weight{0}) continue;
    Weight share = w;
    if constexpr (!PermMeasure<Weight>::kExact) share = w / static_cast<double>(outcomes);
    const SmallOrder base = lehmer_unrank(r, n);
    for (std::uint64_t k = 0; k < outcomes; ++k) {
      SmallOrder o = base;
      apply(o, k);
      next.add(lehmer_rank(o, n), share);
    }
  }
  return next;
}

// One round of a step-decomposable kind (everything except CCRR).
template <class Weight>
PermMeasure<Weight> push_stepwise_round(const PermMeasure<Weight>& m, ShuffleKind kind) {
  const std::size_t n = m.n();
  PermMeasure<Weight> cur = m;
  for (std::size_t step = 1; step <= n; ++step) {
    switch (kind) {
      case ShuffleKind::CCR:
      case ShuffleKind::CCRR:  // CCRR from the sorted deck coincides with CCR
        cur = push_step(cur, n, [&](SmallOrder& o, std::uint64_t k) {
          small_remove_insert(o, static_cast<std::uint8_t>(step), k + 1);
        });
        break;
      case ShuffleKind::TopToRandom:
        cur = push_step(cur, n, [&](SmallOrder& o, std::uint64_t k) { small_remove_insert(o, o[0], k + 1); });
        break;
      case ShuffleKind::CyclicToRandom:
        cur = push_step(cur, n, [&](SmallOrder& o, std::uint64_t k) { std::swap(o[step - 1], o[k]); });
        break;
      case ShuffleKind::RandomTranspositions:
        cur = push_step(cur, static_cast<std::uint64_t>(n) * n,
                        [&](SmallOrder& o, std::uint64_t k) { std::swap(o[k / n], o[k % n]); });
        break;
    }
  }
  return cur;
}

}  // namespace detail

/// Law of the order after one CCRR (equivalently CCR) round from the sorted deck.
template <class Weight>
PermMeasure<Weight> ccrr_round_law(std::size_t n) {
  return detail::push_stepwise_round(PermMeasure<Weight>::point_mass(n), ShuffleKind::CCR);
}

/**
 * Exact one-round pushforward of `dist` under `kind`. For CCRR, pass a
 * precomputed `round_law` (ccrr_round_law) to avoid recomputing it per round.
 */
template <class Weight>
PermMeasure<Weight> exact_round_push(const PermMeasure<Weight>& dist, ShuffleKind kind,
                                     const PermMeasure<Weight>* round_law = nullptr) {
  if (kind != ShuffleKind::CCRR) return detail::push_stepwise_round(dist, kind);
  const std::size_t n = dist.n();
  PermMeasure<Weight> own;
  if (round_law == nullptr) {
    own = ccrr_round_law<Weight>(n);
    round_law = &own;
  }
  PermMeasure<Weight> next = dist.empty_like();
  if constexpr (PermMeasure<Weight>::kExact) {
    Weight d = 0;
    if (__builtin_mul_overflow(dist.denominator(), round_law->denominator(), &d))
      throw capability_error("exact distribution denominator overflows 128 bits");
    next.set_denominator(d);
  }
  std::vector<std::pair<SmallOrder, Weight>> law;
  for (std::size_t r = 0; r < round_law->states(); ++r)
    if (round_law->weight(r) != Weight{0}) law.emplace_back(lehmer_unrank(r, n), round_law->weight(r));
  for (std::size_t r = 0; r < dist.states(); ++r) {
    const Weight w = dist.weight(r);
    if (w == Weight{0}) continue;
    const SmallOrder x = lehmer_unrank(r, n);
    for (const auto& [rel, lw] : law) {
      // Position q ends up holding the card that sat at position rel[q] at round start.
      SmallOrder o{};
      for (std::size_t q = 0; q < n; ++q) o[q] = x[rel[q] - 1];
      next.add(lehmer_rank(o, n), w * lw);
    }
  }
  return next;
}

/// TV to uniform after rounds 0..rounds, starting from the sorted deck.
inline std::vector<double> exact_tv_table(std::size_t n, ShuffleKind kind, std::size_t rounds) {
  auto dist = PermDistribution::point_mass(n);
  const auto law = kind == ShuffleKind::CCRR ? ccrr_round_law<double>(n) : PermDistribution{};
  std::vector<double> tv{tv_to_uniform(dist)};
  for (std::size_t t = 1; t <= rounds; ++t) {
    dist = exact_round_push(dist, kind, kind == ShuffleKind::CCRR ? &law : nullptr);
    tv.push_back(tv_to_uniform(dist));
  }
  return tv;
}

/// Exact rational TV after rounds 0..rounds; throws capability_error on overflow.
inline std::vector<Rational> exact_tv_table_rational(std::size_t n, ShuffleKind kind, std::size_t rounds) {
  auto dist = ExactPermDistribution::point_mass(n);
  const auto law = kind == ShuffleKind::CCRR ? ccrr_round_law<int128>(n) : ExactPermDistribution{};
  std::vector<Rational> tv{tv_to_uniform(dist)};
  for (std::size_t t = 1; t <= rounds; ++t) {
    dist = exact_round_push(dist, kind, kind == ShuffleKind::CCRR ? &law : nullptr);
    tv.push_back(tv_to_uniform(dist));
  }
  return tv;
}

/// counts[a-1][z-1]: number of equally likely outcomes in which card a ends at z.
struct SingleCardCounts {
  std::size_t n = 0;
  std::vector<std::vector<int128>> counts;
  int128 denominator = 1;
};

/// One-round single-card transition counts from the sorted deck.
inline SingleCardCounts exact_single_card_counts(std::size_t n, ShuffleKind kind) {
  const auto law = detail::push_stepwise_round(ExactPermDistribution::point_mass(n), kind);
  SingleCardCounts out;
  out.n = n;
  out.denominator = law.denominator();
  out.counts.assign(n, std::vector<int128>(n, 0));
  for (std::size_t r = 0; r < law.states(); ++r) {
    const int128 w = law.weight(r);
    if (w == 0) continue;
    const SmallOrder o = lehmer_unrank(r, n);
    for (std::size_t p = 0; p < n; ++p) out.counts[o[p] - 1][p] += w;
  }
  return out;
}

/// Row a: law of card a's position after one round from the sorted deck.
inline GridKernel exact_single_card_kernel(std::size_t n, ShuffleKind kind) {
  const auto c = exact_single_card_counts(n, kind);
  std::vector<double> data(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t z = 0; z < n; ++z)
      data[a * n + z] = static_cast<double>(c.counts[a][z]) / static_cast<double>(c.denominator);
  return GridKernel(n, std::move(data));
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_EXACT_MIXING_HPP
