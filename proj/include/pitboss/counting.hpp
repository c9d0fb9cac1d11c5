#pragma once

#include <stdexcept>

#include "pitboss/cards.hpp"

namespace pitboss {

/// High-low tag of a rank: 2..6 count up, 7..9 are neutral, tens and aces
/// count down.
inline int high_low_value(Rank rank) {
  if (!rank_valid(rank)) throw std::domain_error("high_low_value: bad rank");
  if (rank >= 2 && rank <= 6) return 1;
  if (rank >= 7 && rank <= 9) return 0;
  return -1;
}

/// Running count plus enough bookkeeping to scale it by decks left.
struct CountState {
  int running = 0;
  int cards_seen = 0;
  double decks_total = 6;

  double decks_remaining() const { return decks_total - cards_seen / 52.0; }

  /// Count per remaining deck, the quantity bet ramps key off.
  double scaled() const {
    const double left = decks_remaining();
    if (left <= 0) throw std::domain_error("scaled count: no cards left to scale by");
    return running / left;
  }

  void reset() {
    running = 0;
    cards_seen = 0;
  }
};

inline void high_low_update(CountState& state, Rank rank) {
  state.running += high_low_value(rank);
  state.cards_seen += 1;
  if (state.decks_remaining() < 0)
    throw std::domain_error("count update: saw more cards than the shoe holds");
}

}  // namespace pitboss
