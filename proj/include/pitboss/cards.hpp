#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pitboss {

/// Card rank: 1 = ace, 2..10 pip value, 11 = J, 12 = Q, 13 = K.
using Rank = std::uint8_t;

inline constexpr Rank kAce = 1;
inline constexpr int kRanks = 13;

/// Point value of a rank before soft-ace resolution (ace counts as 1 here).
inline constexpr int card_value(Rank rank) {
    return rank < 10 ? rank : 10;
}

inline bool rank_valid(Rank rank) { return rank >= 1 && rank <= 13; }

inline std::string rank_name(Rank rank) {
    static const char* names[] = {"?", "A", "2", "3", "4", "5",  "6",
                                  "7", "8", "9", "10", "J", "Q", "K"};
    return rank_valid(rank) ? names[rank] : "?";
}

/// Resolved total of a hand. `soft` is true iff one ace currently counts
/// as 11, in which case best == hard + 10.
struct HandTotal {
    int hard = 0;
    bool soft = false;
    int best = 0;

    bool bust() const { return best > 21; }
};

inline bool operator==(const HandTotal& a, const HandTotal& b) {
    return a.hard == b.hard && a.soft == b.soft && a.best == b.best;
}

/// Best legal total for a set of cards. At most one ace can count as 11
/// (two would bust), so the hand is soft iff it holds an ace and
/// hard + 10 <= 21.
inline HandTotal hand_total(std::span<const Rank> cards) {
    if (cards.empty()) throw std::domain_error("hand_total: empty hand");
    HandTotal t;
    bool has_ace = false;
    for (Rank r : cards) {
        if (!rank_valid(r)) throw std::domain_error("hand_total: bad rank");
        t.hard += card_value(r);
        has_ace |= (r == kAce);
    }
    t.soft = has_ace && t.hard + 10 <= 21;
    t.best = t.soft ? t.hard + 10 : t.hard;
    return t;
}

inline HandTotal hand_total(const std::vector<Rank>& cards) {
    return hand_total(std::span<const Rank>(cards));
}

/// True iff exactly two cards totalling 21 (ace + ten-value).
inline bool is_natural(std::span<const Rank> cards) {
    return cards.size() == 2 && hand_total(cards).best == 21;
}

inline bool is_natural(const std::vector<Rank>& cards) {
    return is_natural(std::span<const Rank>(cards));
}

}  // namespace pitboss
