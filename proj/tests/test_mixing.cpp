#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <shuffle_spectra/deck.hpp>
#include <shuffle_spectra/exact_mixing.hpp>
#include <shuffle_spectra/single_card.hpp>
#include <shuffle_spectra/test_statistic.hpp>

using namespace shuffle_spectra;

namespace {

// Replays a fixed list of draws.
struct Digits {
  std::vector<std::uint64_t> d;
  std::size_t at = 0;
  std::uint64_t slot(std::uint64_t) { return d[at++]; }
};

std::size_t draws_per_round(ShuffleKind kind, std::size_t n) {
  return kind == ShuffleKind::RandomTranspositions ? 2 * n : n;
}

// Order -> number of equally likely draw sequences producing it. Deliberately naive.
using Counts = std::map<std::vector<Card>, std::uint64_t>;

Counts brute_round(const Counts& in, ShuffleKind kind, std::size_t n) {
  const std::size_t k = draws_per_round(kind, n);
  std::uint64_t outcomes = 1;
  for (std::size_t i = 0; i < k; ++i) outcomes *= n;
  Counts out;
  for (const auto& [order, w] : in) {
    for (std::uint64_t code = 0; code < outcomes; ++code) {
      Digits src;
      std::uint64_t c = code;
      for (std::size_t i = 0; i < k; ++i, c /= n) src.d.push_back(c % n + 1);
      Deck deck = Deck::from_order(order);
      run_round(deck, kind, src);
      out[deck.order()] += w;
    }
  }
  return out;
}

Counts brute_start(std::size_t n) {
  std::vector<Card> id(n);
  std::iota(id.begin(), id.end(), Card{1});
  return {{id, 1}};
}

std::uint64_t total(const Counts& c) {
  std::uint64_t s = 0;
  for (const auto& [o, w] : c) s += w;
  return s;
}

// Exact TV as a fraction (numerator, denominator), unreduced.
std::pair<int128, int128> brute_tv_exact(const Counts& c, std::size_t n) {
  int128 f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<int128>(i);
  const int128 d = static_cast<int128>(total(c));
  int128 s = 0;
  for (const auto& [o, w] : c) {
    const int128 x = f * static_cast<int128>(w) - d;
    s += x < 0 ? -x : x;
  }
  s += (f - static_cast<int128>(c.size())) * d;
  return {s, 2 * f * d};
}

}  // namespace

TEST(ExactMixing, MatchesBruteForceExactlyForSmallDecks) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const std::size_t rounds = 6;  // at most 4^24 outcomes: fits the 64-bit counters
    const auto exact = exact_tv_table_rational(n, ShuffleKind::CCRR, rounds);
    Counts c = brute_start(n);
    for (std::size_t t = 0; t <= rounds; ++t) {
      const auto [num, den] = brute_tv_exact(c, n);
      EXPECT_TRUE(exact[t].num * den == num * exact[t].den) << "n=" << n << " t=" << t;
      if (t < rounds) c = brute_round(c, ShuffleKind::CCRR, n);
    }
  }
}

TEST(ExactMixing, MatchesBruteForceFiveCards) {
  const std::size_t n = 5, rounds = 6;
  const auto exact = exact_tv_table(n, ShuffleKind::CCRR, rounds);
  // Normalize each round so the counters stay small.
  std::map<std::vector<Card>, double> p{{{1, 2, 3, 4, 5}, 1.0}};
  for (std::size_t t = 1; t <= rounds; ++t) {
    std::map<std::vector<Card>, double> next;
    for (const auto& [order, w] : p) {
      const auto step = brute_round({{order, 1}}, ShuffleKind::CCRR, n);
      const double d = static_cast<double>(total(step));
      for (const auto& [o, c] : step) next[o] += w * static_cast<double>(c) / d;
    }
    p.swap(next);
    double s = 0.0;
    for (const auto& [o, w] : p) s += std::abs(w - 1.0 / 120);
    s += (120.0 - static_cast<double>(p.size())) / 120;
    EXPECT_NEAR(exact[t], 0.5 * s, 1e-12) << t;
  }
}

TEST(ExactMixing, OtherKindsMatchBruteForce) {
  for (ShuffleKind kind : {ShuffleKind::CCR, ShuffleKind::CyclicToRandom, ShuffleKind::TopToRandom,
                           ShuffleKind::RandomTranspositions}) {
    const std::size_t n = 3;
    const auto exact = exact_tv_table_rational(n, kind, 3);
    Counts c = brute_start(n);
    for (std::size_t t = 0; t <= 3; ++t) {
      const auto [num, den] = brute_tv_exact(c, n);
      EXPECT_TRUE(exact[t].num * den == num * exact[t].den) << to_string(kind) << " t=" << t;
      if (t < 3) c = brute_round(c, kind, n);
    }
  }
}

TEST(ExactMixing, TvStrictlyDecreasingForCcrr) {
  for (std::size_t n : {4u, 5u}) {
    const auto tv = exact_tv_table(n, ShuffleKind::CCRR, 6);
    for (std::size_t t = 1; t < tv.size(); ++t) EXPECT_LT(tv[t], tv[t - 1]) << "n=" << n << " t=" << t;
  }
}

TEST(ExactMixing, TwoCardsByHand) {
  // Every slot pair (s1, s2) is equally likely; the second slot alone fixes the order.
  const auto tv = exact_tv_table_rational(2, ShuffleKind::CCRR, 2);
  EXPECT_EQ(tv[0], (Rational{1, 2}));
  EXPECT_EQ(tv[1], (Rational{0, 1}));
  EXPECT_EQ(tv[2], (Rational{0, 1}));
}

TEST(ExactMixing, PointMassAndUniform) {
  const auto p = ExactPermDistribution::point_mass(4);
  EXPECT_EQ(tv_to_uniform(p), (Rational{23, 24}));
  for (ShuffleKind kind : kAllShuffleKinds) {
    const auto u = exact_round_push(ExactPermDistribution::uniform(4), kind);
    EXPECT_EQ(tv_to_uniform(u), (Rational{0, 1})) << to_string(kind);
    EXPECT_DOUBLE_EQ(u.total(), 1.0);
  }
  EXPECT_THROW(PermDistribution::point_mass(8), capability_error);
}

TEST(ExactMixing, DoubleAndExactAgree) {
  const auto d = exact_tv_table(5, ShuffleKind::CCRR, 5);
  const auto r = exact_tv_table_rational(5, ShuffleKind::CCRR, 5);
  for (std::size_t t = 0; t < d.size(); ++t) EXPECT_NEAR(d[t], r[t].to_double(), 1e-14);
}

TEST(ExactMixing, LehmerRoundTrip) {
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t r = 0; r < factorial(n); ++r) EXPECT_EQ(lehmer_rank(lehmer_unrank(r, n), n), r);
}

TEST(SingleCardKernel, SmallCases) {
  const auto k1 = exact_single_card_kernel(1, ShuffleKind::CCRR);
  EXPECT_EQ(k1(0, 0), 1.0);
  const auto k2 = exact_single_card_kernel(2, ShuffleKind::CCRR);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(k2(i, j), 0.5);
  for (std::size_t n = 3; n <= 6; ++n) {
    const auto c = exact_single_card_counts(n, ShuffleKind::CCRR);
    for (const auto& row : c.counts) EXPECT_TRUE(std::accumulate(row.begin(), row.end(), int128{0}) == c.denominator);
  }
}

TEST(SingleCardKernel, MatchesBruteForceMarginal) {
  const std::size_t n = 5;
  const auto c = exact_single_card_counts(n, ShuffleKind::CCRR);
  const Counts law = brute_round(brute_start(n), ShuffleKind::CCRR, n);
  std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n, 0));
  for (const auto& [o, w] : law)
    for (std::size_t p = 0; p < n; ++p) m[o[p] - 1][p] += w;
  ASSERT_TRUE(c.denominator == static_cast<int128>(total(law)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t z = 0; z < n; ++z) EXPECT_TRUE(c.counts[a][z] == static_cast<int128>(m[a][z])) << a << "," << z;
}

TEST(SingleCardKernel, EmpiricalRowsConverge) {
  const std::size_t n = 6, reps = 200000;
  const auto k = exact_single_card_kernel(n, ShuffleKind::CCRR);
  for (std::size_t card = 1; card <= n; ++card) {
    const auto e = empirical_single_card(n, card, reps, {.buckets = 3, .seed = 40 + card});
    for (std::size_t z = 0; z < n; ++z) {
      const double p = k(card - 1, z);
      const double se = std::sqrt(p * (1 - p) / static_cast<double>(reps));
      EXPECT_NEAR(e.row[z], p, 5 * se + 1e-12) << card << "," << z + 1;
    }
  }
}

TEST(SingleCardEmpirical, ThreadIndependentAndWellFormed) {
  const auto a = empirical_single_card(200, 100, 5000, {.buckets = 10, .seed = 3, .threads = 1});
  const auto b = empirical_single_card(200, 100, 5000, {.buckets = 10, .seed = 3, .threads = 3});
  EXPECT_EQ(a.row, b.row);
  std::size_t counted = 0;
  for (std::size_t i = 0; i < a.buckets.size(); ++i) {
    EXPECT_EQ(a.buckets[i].count, b.buckets[i].count);
    EXPECT_EQ(a.buckets[i].mean_residual, b.buckets[i].mean_residual);
    counted += a.buckets[i].count;
    EXPECT_TRUE(conditional_variance_ok(a.buckets[i], 200));
  }
  EXPECT_EQ(counted, 5000u);
  EXPECT_NEAR(std::accumulate(a.row.begin(), a.row.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(empirical_single_card(10, 11, 5), std::invalid_argument);
  EXPECT_THROW(empirical_single_card(10, 1, 0), std::invalid_argument);
}

TEST(TestStatistic, ConstantPhiIsDeckInvariant) {
  const TestStatistic s(std::vector<double>(16, 2.0));
  EXPECT_EQ(s.active_cards().size(), 16u);
  RngStream rng(5, 0);
  const auto deck = FastDeck::from_order(random_order(16, rng));
  EXPECT_NEAR(s.evaluate(deck), 4.0, 1e-12);
  EXPECT_THROW(TestStatistic(std::vector<double>(4, 0.0)), std::invalid_argument);
  EXPECT_THROW(s.evaluate(FastDeck(15)), std::invalid_argument);
}

TEST(TestStatistic, ActiveCardsFollowSign) {
  const TestStatistic s(std::vector<double>{-1.0, 2.0, 0.0, 3.0});
  ASSERT_EQ(s.active_cards().size(), 2u);
  EXPECT_EQ(s.active_cards()[0], 2u);
  EXPECT_EQ(s.active_cards()[1], 4u);
  // Swap cards 1 and 4: card 4 now sits where phi is negative.
  const auto deck = Deck::from_order(std::vector<Card>{4, 2, 3, 1});
  const double scale = std::sqrt(14.0);
  EXPECT_NEAR(s.evaluate(deck), (2.0 - 1.0) / scale, 1e-15);
}

TEST(LowerBoundExperiment, ZeroRoundsAndStationaryMean) {
  const std::size_t n = 100;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = std::cos(M_PI * (i + 0.5) / n);  // sums to zero
  const auto tr = run_lower_bound_experiment(n, 0, 400, phi, 0.2, {.seed = 11, .stationary_reps = 4000});
  ASSERT_EQ(tr.rounds.size(), 1u);
  EXPECT_EQ(tr.rounds[0].variance, 0.0);
  EXPECT_EQ(tr.rounds[0].mean, tr.s0);
  EXPECT_GT(tr.s0, 0.0);
  const double se = std::sqrt(tr.stationary.variance / 4000.0);
  EXPECT_NEAR(tr.stationary.mean, 0.0, 5 * se);
  EXPECT_EQ(tr.stationary.reps, 4000u);
}

TEST(LowerBoundExperiment, ThreadIndependentAndDecaying) {
  const std::size_t n = 200;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = std::cos(M_PI * (i + 0.5) / n);
  const auto a = run_lower_bound_experiment(n, 3, 300, phi, 0.2, {.seed = 9, .threads = 1, .fit_rounds = 2});
  const auto b = run_lower_bound_experiment(n, 3, 300, phi, 0.2, {.seed = 9, .threads = 3, .fit_rounds = 2});
  for (std::size_t t = 0; t <= 3; ++t) {
    EXPECT_EQ(a.rounds[t].mean, b.rounds[t].mean);
    EXPECT_EQ(a.rounds[t].variance, b.rounds[t].variance);
  }
  EXPECT_EQ(a.r_hat, b.r_hat);
  EXPECT_LT(a.rounds[1].mean_abs, a.rounds[0].mean_abs);
  EXPECT_EQ(a.fit_rounds, 2u);
  EXPECT_THROW(run_lower_bound_experiment(n, 1, 0, phi, 0.2), std::invalid_argument);
  EXPECT_THROW(run_lower_bound_experiment(n + 1, 1, 5, phi, 0.2), std::invalid_argument);
}

TEST(LowerBoundExperiment, LowerBoundRound) {
  EXPECT_EQ(lower_bound_round(2000, 0.2132), 0u);
  EXPECT_EQ(lower_bound_round(1000000000000ULL, 0.2132), 1u);
  EXPECT_EQ(lower_bound_round(100, 0.0), 0u);
  EXPECT_EQ(lower_bound_round(100, 1.0), 0u);
  // log n / (9 log 2) with n = 2^19 is about 2.1.
  EXPECT_EQ(lower_bound_round(1u << 19, 0.5), 2u);
}
