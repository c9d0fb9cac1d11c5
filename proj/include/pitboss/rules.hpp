#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitboss/cards.hpp"
#include "pitboss/config.hpp"
#include "pitboss/rng.hpp"

namespace pitboss {

/// House rules. Defaults are the table baseline: six decks, dealer stands on
/// all 17s, blackjack pays 3:2, one split only, split aces get one card each.
struct RuleConfig {
    int deck_count = 6;
    bool dealer_hits_soft_17 = false;
    int blackjack_payout_num = 3;
    int blackjack_payout_den = 2;
    bool double_after_split = false;
    double penetration = 0.75;

    double blackjack_payout() const {
        return static_cast<double>(blackjack_payout_num) / blackjack_payout_den;
    }

    static RuleConfig from_kv(const KeyValueFile& kv) {
        RuleConfig r;
        r.deck_count = static_cast<int>(kv.get_int("deck_count", r.deck_count));
        r.dealer_hits_soft_17 = kv.get_bool("dealer_hits_soft_17", r.dealer_hits_soft_17);
        if (kv.has("blackjack_payout")) {
            const std::string v = kv.get("blackjack_payout", "");
            const auto colon = v.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("rules: blackjack_payout wants the form 3:2");
            try {
                r.blackjack_payout_num = std::stoi(v.substr(0, colon));
                r.blackjack_payout_den = std::stoi(v.substr(colon + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument("rules: bad blackjack_payout: " + v);
            }
        }
        r.double_after_split = kv.get_bool("double_after_split", r.double_after_split);
        r.penetration = kv.get_double("penetration", r.penetration);
        r.validate();
        return r;
    }

    void validate() const {
        if (deck_count < 1) throw std::domain_error("rules: deck_count must be >= 1");
        if (blackjack_payout_num <= 0 || blackjack_payout_den <= 0)
            throw std::domain_error("rules: payout ratio must be positive");
        if (penetration <= 0.0 || penetration > 1.0)
            throw std::domain_error("rules: penetration must be in (0, 1]");
    }
};

enum class Outcome { Won, Loss, Push, Bust, Blackjack };

inline std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Won: return "won";
        case Outcome::Loss: return "loss";
        case Outcome::Push: return "push";
        case Outcome::Bust: return "bust";
        case Outcome::Blackjack: return "blackjack";
    }
    return "?";
}

inline Outcome outcome_from_string(const std::string& s) {
    if (s == "won") return Outcome::Won;
    if (s == "loss") return Outcome::Loss;
    if (s == "push") return Outcome::Push;
    if (s == "bust") return Outcome::Bust;
    if (s == "blackjack") return Outcome::Blackjack;
    throw std::invalid_argument("unknown outcome: " + s);
}

/// Outcome of a resolved player hand against the dealer's final total.
/// Dealer naturals are settled by the caller before any play (peek), so a
/// two-card 21 here is always a player blackjack.
inline Outcome adjudicate(const HandTotal& player, int player_card_count,
                          const HandTotal& dealer) {
    if (player.best > 21) return Outcome::Bust;
    if (player_card_count == 2 && player.best == 21) return Outcome::Blackjack;
    if (dealer.best > 21) return Outcome::Won;
    if (player.best > dealer.best) return Outcome::Won;
    if (player.best == dealer.best) return Outcome::Push;
    return Outcome::Loss;
}

/// Signed payout for one resolved hand. Even money on Won/Loss, doubled
/// stakes double the swing, pushes return the wager.
inline double settle(Outcome outcome, double bet, bool doubled,
                     const RuleConfig& rules = RuleConfig{}) {
    if (bet <= 0) throw std::domain_error("settle: bet must be positive");
    const double stake = doubled ? 2 * bet : bet;
    switch (outcome) {
        case Outcome::Won: return stake;
        case Outcome::Loss:
        case Outcome::Bust: return -stake;
        case Outcome::Push: return 0.0;
        case Outcome::Blackjack:
            if (doubled) throw std::domain_error("settle: doubled blackjack is impossible");
            return bet * rules.blackjack_payout();
    }
    return 0.0;
}

/// Multi-deck dealing shoe. Suit-agnostic: only ranks are tracked. Shuffling
/// uses the project Rng so identical seeds give identical card orders on any
/// platform. A shoe built from an explicit sequence never reshuffles, which
/// tests use to force exact deals.
class Shoe {
public:
    explicit Shoe(int deck_count, std::uint64_t seed, double penetration = 0.75)
        : deck_count_(deck_count), penetration_(penetration), rng_(seed) {
        if (deck_count < 1) throw std::domain_error("shoe: deck_count must be >= 1");
        shuffle();
    }

    /// Rigged shoe dealing exactly `order`, then throwing when exhausted.
    static Shoe from_sequence(std::vector<Rank> order) {
        Shoe s;
        s.cards_ = std::move(order);
        s.rigged_ = true;
        return s;
    }

    Rank draw() {
        if (next_ >= cards_.size()) {
            if (rigged_) throw std::domain_error("shoe exhausted");
            shuffle();
        }
        return cards_[next_++];
    }

    /// Reshuffle point check, called between hands.
    bool needs_shuffle() const {
        if (rigged_) return false;
        return static_cast<double>(next_) >= penetration_ * static_cast<double>(cards_.size());
    }

    void shuffle() {
        if (rigged_) return;
        cards_.clear();
        cards_.reserve(static_cast<std::size_t>(deck_count_) * 52);
        for (Rank r = 1; r <= 13; ++r)
            cards_.insert(cards_.end(), static_cast<std::size_t>(deck_count_) * 4, r);
        rng_.shuffle(cards_);
        next_ = 0;
    }

    std::size_t size() const { return cards_.size(); }
    std::size_t drawn() const { return next_; }
    std::size_t remaining() const { return cards_.size() - next_; }
    int deck_count() const { return deck_count_; }

private:
    Shoe() = default;

    int deck_count_ = 0;
    double penetration_ = 0.75;
    bool rigged_ = false;
    std::vector<Rank> cards_;
    std::size_t next_ = 0;
    Rng rng_;
};

/// Plays out the dealer hand: draw until the best total reaches 17, standing
/// on soft 17 unless the rules hit it. Returns the full dealer hand.
inline std::vector<Rank> dealer_play(std::vector<Rank> upcards, Shoe& shoe,
                                     const RuleConfig& rules = RuleConfig{}) {
    if (upcards.size() < 2) throw std::domain_error("dealer_play: dealer needs two cards");
    for (;;) {
        const HandTotal t = hand_total(upcards);
        if (t.best > 17) break;
        if (t.best == 17 && !(t.soft && rules.dealer_hits_soft_17)) break;
        upcards.push_back(shoe.draw());
    }
    return upcards;
}

}  // namespace pitboss
