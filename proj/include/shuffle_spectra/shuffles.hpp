#ifndef SHUFFLE_SPECTRA_SHUFFLES_HPP
#define SHUFFLE_SPECTRA_SHUFFLES_HPP

#include <array>
#include <concepts>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deck.hpp"
#include "rng.hpp"

namespace shuffle_spectra {

enum class ShuffleKind {
  CCR,                   // card-cyclic-to-random: cards visited in original-label order every round
  CCRR,                  // CCR with relabeling: cards visited in start-of-round position order
  CyclicToRandom,        // step k swaps position k with a uniform position
  TopToRandom,           // each step moves the top card to a uniform position
  RandomTranspositions,  // each step swaps two independently uniform positions
};

inline constexpr std::array<ShuffleKind, 5> kAllShuffleKinds{ShuffleKind::CCR, ShuffleKind::CCRR,
                                                               ShuffleKind::CyclicToRandom, ShuffleKind::TopToRandom,
                                                               ShuffleKind::RandomTranspositions};

inline std::string_view to_string(ShuffleKind kind) {
  switch (kind) {
    case ShuffleKind::CCR: return "ccr";
    case ShuffleKind::CCRR: return "ccrr";
    case ShuffleKind::CyclicToRandom: return "cyclic-to-random";
    case ShuffleKind::TopToRandom: return "top-to-random";
    case ShuffleKind::RandomTranspositions: return "random-transpositions";
  }
  return "?";
}

inline std::optional<ShuffleKind> parse_shuffle_kind(std::string_view name) {
  for (ShuffleKind k : kAllShuffleKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

/**
 * Record of one round. `slots[k]` is the insertion slot drawn at step k + 1
 * (for RandomTranspositions, the second of the two swapped positions).
 */
struct RoundTrace {
  std::size_t round = 0;
  std::vector<Position> slots;
};

/// Source of per-step slots; RngStream in production, scripted in tests.
template <class Source>
concept SlotSource = requires(Source& s, std::uint64_t n) {
  { s.slot(n) } -> std::convertible_to<std::uint64_t>;
};

/**
 * One round (n steps) of `kind`. For CCRR the visiting order is the deck's
 * order at the start of this round, which is the relabeling of the previous
 * round's end state; for CCR it is card 1, 2, ..., n.
 */
template <class AnyDeck, SlotSource Source>
RoundTrace run_round(AnyDeck& deck, ShuffleKind kind, Source& rng, std::size_t round_index = 1) {
  const std::size_t n = deck.size();
  RoundTrace trace;
  trace.round = round_index;
  trace.slots.reserve(n);
  switch (kind) {
    case ShuffleKind::CCR:
      for (Card c = 1; c <= n; ++c) {
        const auto s = static_cast<Position>(rng.slot(n));
        deck.remove_insert(c, s);
        trace.slots.push_back(s);
      }
      break;
    case ShuffleKind::CCRR: {
      const auto visit = deck.order();
      for (Card c : visit) {
        const auto s = static_cast<Position>(rng.slot(n));
        deck.remove_insert(c, s);
        trace.slots.push_back(s);
      }
      break;
    }
    case ShuffleKind::CyclicToRandom:
      for (Position k = 1; k <= n; ++k) {
        const auto s = static_cast<Position>(rng.slot(n));
        deck.swap_positions(k, s);
        trace.slots.push_back(s);
      }
      break;
    case ShuffleKind::TopToRandom:
      for (std::size_t k = 0; k < n; ++k) {
        const auto s = static_cast<Position>(rng.slot(n));
        deck.remove_insert(deck.card_at(1), s);
        trace.slots.push_back(s);
      }
      break;
    case ShuffleKind::RandomTranspositions:
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Position>(rng.slot(n));
        const auto j = static_cast<Position>(rng.slot(n));
        deck.swap_positions(i, j);
        trace.slots.push_back(j);
      }
      break;
  }
  return trace;
}

/// t rounds of `kind`; on_round(trace, deck) is called after each one.
template <class AnyDeck, SlotSource Source, class OnRound>
void run_rounds(AnyDeck& deck, ShuffleKind kind, std::size_t rounds, Source& rng, OnRound&& on_round) {
  for (std::size_t t = 1; t <= rounds; ++t) {
    const RoundTrace trace = run_round(deck, kind, rng, t);
    on_round(trace, static_cast<const AnyDeck&>(deck));
  }
}

template <class AnyDeck, SlotSource Source>
void run_rounds(AnyDeck& deck, ShuffleKind kind, std::size_t rounds, Source& rng) {
  run_rounds(deck, kind, rounds, rng, [](const RoundTrace&, const AnyDeck&) {});
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_SHUFFLES_HPP
