#ifndef SHUFFLE_SPECTRA_DECK_HPP
#define SHUFFLE_SPECTRA_DECK_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace shuffle_spectra {

/// Card labels and deck positions are both 1-based; position 1 is the top.
using Card = std::size_t;
using Position = std::size_t;

namespace detail {

inline void check_permutation(std::span<const Card> order) {
  const std::size_t n = order.size();
  std::vector<bool> seen(n + 1, false);
  for (Card c : order) {
    if (c < 1 || c > n || seen[c]) throw std::invalid_argument("deck order is not a permutation of 1..n");
    seen[c] = true;
  }
}

}  // namespace detail

/**
 * Array-backed deck: `order[p-1]` is the card at position p and `inv[c]` the
 * position of card c. remove_insert costs O(n).
 */
class Deck {
 public:
  Deck() = default;

  /// Sorted deck: card i in position i.
  explicit Deck(std::size_t n) : order_(n), inv_(n + 1, 0) {
    for (std::size_t p = 1; p <= n; ++p) {
      order_[p - 1] = p;
      inv_[p] = p;
    }
  }

  /// Deck with the given top-to-bottom order of card labels.
  static Deck from_order(std::span<const Card> order) {
    detail::check_permutation(order);
    Deck d;
    d.order_.assign(order.begin(), order.end());
    d.inv_.assign(order.size() + 1, 0);
    for (std::size_t p = 1; p <= order.size(); ++p) d.inv_[order[p - 1]] = p;
    return d;
  }

  std::size_t size() const noexcept { return order_.size(); }
  Card card_at(Position p) const { return order_.at(p - 1); }
  Position position_of(Card c) const {
    if (c < 1 || c > size()) throw std::invalid_argument("card " + std::to_string(c) + " not in deck");
    return inv_[c];
  }
  std::vector<Card> order() const { return order_; }

  /// Removes `card` and reinserts it so that its final position is `slot`.
  void remove_insert(Card card, Position slot) {
    const std::size_t n = size();
    if (card < 1 || card > n) throw std::invalid_argument("remove_insert: card " + std::to_string(card) + " absent");
    if (slot < 1 || slot > n) throw std::invalid_argument("remove_insert: slot " + std::to_string(slot) + " out of range");
    const Position from = inv_[card];
    if (slot < from) {
      for (Position p = from; p > slot; --p) {
        order_[p - 1] = order_[p - 2];
        inv_[order_[p - 1]] = p;
      }
    } else {
      for (Position p = from; p < slot; ++p) {
        order_[p - 1] = order_[p];
        inv_[order_[p - 1]] = p;
      }
    }
    order_[slot - 1] = card;
    inv_[card] = slot;
  }

  void swap_positions(Position i, Position j) {
    if (i < 1 || i > size() || j < 1 || j > size()) throw std::invalid_argument("swap_positions: position out of range");
    std::swap(order_[i - 1], order_[j - 1]);
    inv_[order_[i - 1]] = i;
    inv_[order_[j - 1]] = j;
  }

  friend bool operator==(const Deck& a, const Deck& b) { return a.order_ == b.order_; }

 private:
  std::vector<Card> order_;
  std::vector<Position> inv_;
};

/**
 * Counted B+ tree over the deck: leaves hold runs of cards in deck order,
 * internal nodes hold subtree sizes, and leaf_of maps a card to its leaf.
 * Inserts split full nodes on the way down. Erases never merge; instead the
 * tree is rebuilt from the current order after every n erases, which keeps
 * the node count O(n / leaf capacity) at O(1) amortized cost per operation.
 *
 * remove_insert, card_at and position_of are O(log n) amortized. Wide nodes
 * keep most of each walk inside a few cache lines.
 */
class FastDeck {
 public:
  FastDeck() { build({}); }

  explicit FastDeck(std::size_t n) {
    std::vector<Card> order(n);
    for (std::size_t p = 0; p < n; ++p) order[p] = p + 1;
    build(order);
  }

  static FastDeck from_order(std::span<const Card> order) {
    detail::check_permutation(order);
    FastDeck d;
    d.build(order);
    return d;
  }

  std::size_t size() const noexcept { return n_; }

  Position position_of(Card c) const {
    if (c < 1 || c > n_) throw std::invalid_argument("card " + std::to_string(c) + " not in deck");
    const Index leaf = leaf_of_[c];
    Position r = index_in_leaf(leaf, static_cast<Index>(c)) + 1;
    Index node = leaf;
    for (Index p = leaves_[leaf].parent; p != kNone; node = p, p = inners_[p].parent) {
      const Inner& in = inners_[p];
      for (Index j = 0; in.child[j] != node; ++j) r += in.size[j];
    }
    return r;
  }

  Card card_at(Position p) const {
    if (p < 1 || p > n_) throw std::out_of_range("card_at: position out of range");
    std::size_t k = p - 1;
    Index node = root_;
    for (std::size_t level = height_; level > 0; --level) {
      const Inner& in = inners_[node];
      Index j = 0;
      while (k >= in.size[j]) k -= in.size[j++];
      node = in.child[j];
    }
    return leaves_[node].card[k];
  }

  std::vector<Card> order() const {
    std::vector<Card> out;
    out.reserve(n_);
    append_order(root_, height_, out);
    return out;
  }

  void remove_insert(Card card, Position slot) {
    if (card < 1 || card > n_) throw std::invalid_argument("remove_insert: card " + std::to_string(card) + " absent");
    if (slot < 1 || slot > n_) throw std::invalid_argument("remove_insert: slot " + std::to_string(slot) + " out of range");
    erase(static_cast<Index>(card));
    insert(static_cast<Index>(card), slot - 1);
    if (++erases_since_build_ >= n_) {
      const auto current = order();
      build(current);
    }
  }

  void swap_positions(Position i, Position j) {
    if (i < 1 || i > n_ || j < 1 || j > n_) throw std::invalid_argument("swap_positions: position out of range");
    if (i == j) return;
    if (i > j) std::swap(i, j);
    const Card upper = card_at(i);
    const Card lower = card_at(j);
    remove_insert(upper, j);  // lower now sits at j - 1
    remove_insert(lower, i);
  }

  friend bool operator==(const FastDeck& a, const FastDeck& b) { return a.order() == b.order(); }

 private:
  using Index = std::uint32_t;
  static constexpr Index kNone = std::numeric_limits<Index>::max();
  static constexpr Index kLeafCap = 64;
  static constexpr Index kFanout = 32;

  struct Leaf {
    Index parent = kNone;
    Index count = 0;
    std::array<Index, kLeafCap> card{};
  };

  struct Inner {
    Index parent = kNone;
    Index count = 0;
    std::array<Index, kFanout> child{};
    std::array<Index, kFanout> size{};
  };

  Index index_in_leaf(Index leaf, Index c) const noexcept {
    const Leaf& l = leaves_[leaf];
    Index i = 0;
    while (l.card[i] != c) ++i;
    return i;
  }

  void set_parent(Index node, std::size_t level, Index parent) noexcept {
    if (level == 0)
      leaves_[node].parent = parent;
    else
      inners_[node].parent = parent;
  }

  bool full(Index node, std::size_t level) const noexcept {
    return level == 0 ? leaves_[node].count == kLeafCap : inners_[node].count == kFanout;
  }

  void erase(Index c) {
    const Index leaf = leaf_of_[c];
    Leaf& l = leaves_[leaf];
    const Index i = index_in_leaf(leaf, c);
    std::copy(l.card.begin() + i + 1, l.card.begin() + l.count, l.card.begin() + i);
    --l.count;
    Index node = leaf;
    for (Index p = l.parent; p != kNone; node = p, p = inners_[p].parent) {
      Inner& in = inners_[p];
      Index j = 0;
      while (in.child[j] != node) ++j;
      --in.size[j];
    }
  }

  // Splits child j of inner node p; the child sits at `level` (0 = leaf).
  void split_child(Index p, Index j, std::size_t level) {
    const Index c = inners_[p].child[j];
    Index fresh = 0, left_size = 0, right_size = 0;
    if (level == 0) {
      fresh = static_cast<Index>(leaves_.size());
      leaves_.emplace_back();
      Leaf& l = leaves_[c];
      Leaf& r = leaves_[fresh];
      const Index h = l.count / 2;
      r.count = l.count - h;
      std::copy(l.card.begin() + h, l.card.begin() + l.count, r.card.begin());
      l.count = h;
      for (Index k = 0; k < r.count; ++k) leaf_of_[r.card[k]] = fresh;
      left_size = l.count;
      right_size = r.count;
    } else {
      fresh = static_cast<Index>(inners_.size());
      inners_.emplace_back();
      Inner& l = inners_[c];
      Inner& r = inners_[fresh];
      const Index h = l.count / 2;
      r.count = l.count - h;
      for (Index k = 0; k < r.count; ++k) {
        r.child[k] = l.child[h + k];
        r.size[k] = l.size[h + k];
        right_size += r.size[k];
      }
      l.count = h;
      for (Index k = 0; k < h; ++k) left_size += l.size[k];
      for (Index k = 0; k < r.count; ++k) set_parent(r.child[k], level - 1, fresh);
    }
    set_parent(fresh, level, p);
    Inner& in = inners_[p];
    for (Index k = in.count; k > j + 1; --k) {
      in.child[k] = in.child[k - 1];
      in.size[k] = in.size[k - 1];
    }
    in.child[j + 1] = fresh;
    in.size[j + 1] = right_size;
    in.size[j] = left_size;
    ++in.count;
  }

  // Inserts card c with k cards before it; the deck currently lacks c.
  void insert(Index c, std::size_t k) {
    if (full(root_, height_)) {
      const Index top = static_cast<Index>(inners_.size());
      inners_.emplace_back();
      inners_[top].count = 1;
      inners_[top].child[0] = root_;
      inners_[top].size[0] = static_cast<Index>(n_ - 1);
      set_parent(root_, height_, top);
      root_ = top;
      ++height_;
    }
    Index node = root_;
    for (std::size_t level = height_; level > 0; --level) {
      Index j = 0;
      while (j + 1 < inners_[node].count && k > inners_[node].size[j]) k -= inners_[node].size[j++];
      if (full(inners_[node].child[j], level - 1)) {
        split_child(node, j, level - 1);
        if (k > inners_[node].size[j]) k -= inners_[node].size[j++];
      }
      ++inners_[node].size[j];
      node = inners_[node].child[j];
    }
    Leaf& l = leaves_[node];
    std::copy_backward(l.card.begin() + k, l.card.begin() + l.count, l.card.begin() + l.count + 1);
    l.card[k] = c;
    ++l.count;
    leaf_of_[c] = node;
  }

  void append_order(Index node, std::size_t level, std::vector<Card>& out) const {
    if (level == 0) {
      const Leaf& l = leaves_[node];
      out.insert(out.end(), l.card.begin(), l.card.begin() + l.count);
      return;
    }
    const Inner& in = inners_[node];
    for (Index j = 0; j < in.count; ++j) append_order(in.child[j], level - 1, out);
  }

  // Packs leaves and inner nodes three-quarters full.
  void build(std::span<const Card> order) {
    if (order.size() >= kNone) throw std::length_error("FastDeck: deck too large for 32-bit indices");
    n_ = order.size();
    erases_since_build_ = 0;
    leaves_.clear();
    inners_.clear();
    leaf_of_.assign(n_ + 1, kNone);
    constexpr Index leaf_fill = kLeafCap * 3 / 4, fan_fill = kFanout * 3 / 4;
    std::vector<Index> level_nodes, level_sizes;
    for (std::size_t start = 0; start < n_ || leaves_.empty(); start += leaf_fill) {
      const Index id = static_cast<Index>(leaves_.size());
      Leaf& l = leaves_.emplace_back();
      l.count = static_cast<Index>(std::min<std::size_t>(leaf_fill, n_ - start));
      for (Index k = 0; k < l.count; ++k) {
        l.card[k] = static_cast<Index>(order[start + k]);
        leaf_of_[order[start + k]] = id;
      }
      level_nodes.push_back(id);
      level_sizes.push_back(l.count);
    }
    height_ = 0;
    while (level_nodes.size() > 1) {
      std::vector<Index> up_nodes, up_sizes;
      for (std::size_t start = 0; start < level_nodes.size(); start += fan_fill) {
        const Index id = static_cast<Index>(inners_.size());
        Inner& in = inners_.emplace_back();
        in.count = static_cast<Index>(std::min<std::size_t>(fan_fill, level_nodes.size() - start));
        Index total = 0;
        for (Index k = 0; k < in.count; ++k) {
          in.child[k] = level_nodes[start + k];
          in.size[k] = level_sizes[start + k];
          total += in.size[k];
        }
        for (Index k = 0; k < in.count; ++k) set_parent(level_nodes[start + k], height_, id);
        up_nodes.push_back(id);
        up_sizes.push_back(total);
      }
      level_nodes.swap(up_nodes);
      level_sizes.swap(up_sizes);
      ++height_;
    }
    root_ = level_nodes.front();
  }

  std::size_t n_ = 0;
  std::size_t height_ = 0;  // inner levels above the leaves
  std::size_t erases_since_build_ = 0;
  Index root_ = 0;
  std::vector<Leaf> leaves_;
  std::vector<Inner> inners_;
  std::vector<Index> leaf_of_;
};

/// For each card i, (position of i) / n. Index 0 holds card 1.
template <class AnyDeck>
std::vector<double> positions_vector(const AnyDeck& deck) {
  const std::size_t n = deck.size();
  std::vector<double> out(n);
  const auto order = deck.order();
  for (std::size_t p = 1; p <= n; ++p) out[order[p - 1] - 1] = static_cast<double>(p) / static_cast<double>(n);
  return out;
}

/// Uniformly random deck by Fisher-Yates driven by `rng`.
inline std::vector<Card> random_order(std::size_t n, RngStream& rng) {
  std::vector<Card> order(n);
  for (std::size_t p = 0; p < n; ++p) order[p] = p + 1;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_DECK_HPP
