#ifndef SHUFFLE_SPECTRA_TEST_STATISTIC_HPP
#define SHUFFLE_SPECTRA_TEST_STATISTIC_HPP

// Eigenvector test statistic S_t and the replicated CCRR experiment that
// watches it decay toward its stationary spread.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "deck.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "shuffles.hpp"
#include "spectral.hpp"

namespace shuffle_spectra {

/**
 * S(deck) = sum over the active cards i (those with phi(i/n) > 0) of
 * phi(position of i / n). Cards are the physical cards of the starting deck;
 * relabeling between CCRR rounds does not change which cards are summed.
 */
class TestStatistic {
 public:
  /// phi is rescaled to unit 2-norm over its n entries.
  explicit TestStatistic(std::vector<double> phi) : phi_(std::move(phi)) {
    if (phi_.empty()) throw std::invalid_argument("TestStatistic: empty phi");
    const double s = norm(phi_);
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("TestStatistic: phi must be finite and nonzero");
    for (double& x : phi_) x /= s;
    for (std::size_t i = 0; i < phi_.size(); ++i)
      if (phi_[i] > 0.0) active_.push_back(i + 1);
  }

  std::size_t size() const noexcept { return phi_.size(); }
  std::span<const double> phi() const noexcept { return phi_; }
  std::span<const Card> active_cards() const noexcept { return active_; }

  template <class AnyDeck>
  double evaluate(const AnyDeck& deck) const {
    if (deck.size() != phi_.size()) throw std::invalid_argument("TestStatistic: deck size must match phi");
    double s = 0.0;
    for (Card c : active_) s += phi_[deck.position_of(c) - 1];
    return s;
  }

 private:
  std::vector<double> phi_;
  std::vector<Card> active_;
};

struct RoundStats {
  std::size_t round = 0;
  double mean_abs = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance (divisor reps - 1), 0 for one replicate
  std::size_t reps = 0;
};

struct StatTrajectory {
  std::size_t n = 0;
  double lambda = 0.0;  // eigenvalue paired with phi
  std::vector<double> phi;
  std::vector<RoundStats> rounds;  // rounds[t] summarizes S_t, t = 0..R
  RoundStats stationary;           // S on uniformly random decks
  double s0 = 0.0;
  double s0_constant = 0.0;        // |S_0| / n^(4/9)
  std::size_t tau = 0;
  std::size_t fit_rounds = 0;
  double r_hat = 0.0;              // (E|S_F| / E|S_0|)^(1/F), F = fit_rounds
  double r_hat_regression = 0.0;   // pooled sum S_t S_{t+1} / sum S_t^2 over t < F
  double separation = 0.0;         // E|S_tau| / (3 (sd S_tau + sd S_inf)); > 1 means separated
};

/// floor(log n / (9 log(1/|lambda|))); 0 when |lambda| is 0 or at least 1.
inline std::size_t lower_bound_round(std::size_t n, double lambda) {
  const double l = std::abs(lambda);
  if (!(l > 0.0) || l >= 1.0 || n < 2) return 0;
  return static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n)) / (9.0 * std::log(1.0 / l))));
}

struct ExperimentOptions {
  std::uint64_t seed = 0x5eed5eed5eedULL;
  unsigned threads = 1;
  std::size_t fit_rounds = 5;
  std::size_t stationary_reps = 0;  // 0: same as reps
  std::function<void(std::size_t done, std::size_t total)> progress;
};

namespace detail {

inline RoundStats summarize(std::size_t round, std::span<const double> s) {
  RoundStats r;
  r.round = round;
  r.reps = s.size();
  if (s.empty()) return r;
  CompensatedSum sum, sum_abs;
  for (double x : s) {
    sum.add(x);
    sum_abs.add(std::abs(x));
  }
  const double m = sum.value() / static_cast<double>(s.size());
  r.mean = m;
  r.mean_abs = sum_abs.value() / static_cast<double>(s.size());
  if (s.size() > 1) {
    CompensatedSum ss;
    for (double x : s) ss.add((x - m) * (x - m));
    r.variance = ss.value() / static_cast<double>(s.size() - 1);
  }
  return r;
}

}  // namespace detail

/**
 * reps independent CCRR runs of `rounds` rounds from the sorted deck.
 * Replicate r uses RngStream(seed, r); the stationary reference uses streams
 * reps, reps+1, ... on Fisher-Yates decks. Results do not depend on threads.
 */
template <class AnyDeck = FastDeck>
StatTrajectory run_lower_bound_experiment(std::size_t n, std::size_t rounds, std::size_t reps,
                                          std::vector<double> phi, double lambda,
                                          const ExperimentOptions& opt = {}) {
  if (n == 0 || phi.size() != n) throw std::invalid_argument("lower bound experiment: phi must have n entries");
  if (reps == 0) throw std::invalid_argument("lower bound experiment: reps must be positive");
  const TestStatistic stat(std::move(phi));
  // values[t * reps + r] = S_t of replicate r
  std::vector<double> values((rounds + 1) * reps);
  std::size_t finished = 0;
  std::mutex progress_mutex;
  parallel_chunks(reps, opt.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(opt.seed, r);
      AnyDeck deck(n);
      values[r] = stat.evaluate(deck);
      for (std::size_t t = 1; t <= rounds; ++t) {
        run_round(deck, ShuffleKind::CCRR, rng, t);
        values[t * reps + r] = stat.evaluate(deck);
      }
      if (opt.progress) {
        std::lock_guard lock(progress_mutex);
        opt.progress(++finished, reps);
      }
    }
  });

  const std::size_t sreps = opt.stationary_reps ? opt.stationary_reps : reps;
  std::vector<double> stationary(sreps);
  parallel_chunks(sreps, opt.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RngStream rng(opt.seed, reps + r);
      const auto order = random_order(n, rng);
      stationary[r] = stat.evaluate(AnyDeck::from_order(order));
    }
  });

  StatTrajectory out;
  out.n = n;
  out.lambda = lambda;
  out.phi.assign(stat.phi().begin(), stat.phi().end());
  for (std::size_t t = 0; t <= rounds; ++t)
    out.rounds.push_back(detail::summarize(t, std::span<const double>(values).subspan(t * reps, reps)));
  out.stationary = detail::summarize(0, stationary);
  out.s0 = values[0];
  out.s0_constant = std::abs(out.s0) / std::pow(static_cast<double>(n), 4.0 / 9.0);
  out.tau = lower_bound_round(n, lambda);

  out.fit_rounds = std::min(opt.fit_rounds, rounds);
  if (out.fit_rounds > 0) {
    const std::size_t f = out.fit_rounds;
    out.r_hat = std::pow(out.rounds[f].mean_abs / out.rounds[0].mean_abs, 1.0 / static_cast<double>(f));
    detail::CompensatedSum num, den;
    for (std::size_t t = 0; t < f; ++t)
      for (std::size_t r = 0; r < reps; ++r) {
        const double a = values[t * reps + r], b = values[(t + 1) * reps + r];
        num.add(a * b);
        den.add(a * a);
      }
    out.r_hat_regression = num.value() / den.value();
  }
  if (out.tau <= rounds) {
    const auto& rt = out.rounds[out.tau];
    const double spread = std::sqrt(rt.variance) + std::sqrt(out.stationary.variance);
    out.separation = spread > 0.0 ? rt.mean_abs / (3.0 * spread) : INFINITY;
  }
  return out;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_TEST_STATISTIC_HPP
