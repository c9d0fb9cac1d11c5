#pragma once

// Deals and plays full table rounds. This is the one place game flow lives;
// the simulator aggregates it and the stream generator renders it.

#include <string>
#include <vector>

#include "pitboss/cards.hpp"
#include "pitboss/hand_record.hpp"
#include "pitboss/rules.hpp"
#include "pitboss/strategy.hpp"

namespace pitboss {

struct SeatPlan {
  int seat = 1;
  double bet = 25;
  bool side_bet = false;
  std::string player_id;  // defaults to p<seat>
};

namespace detail {

// Plays one hand to completion from its current cards. Returns the decision
// trail; cards are drawn into `cards`. A 21 stops play with a recorded stand,
// busts and doubles stop it by rule.
inline std::vector<Action> run_decisions(std::vector<Rank>& cards, Rank upcard,
                                         const Policy& policy, Shoe& shoe,
                                         const RuleConfig& rules, Rng& rng,
                                         bool in_split, bool& doubled) {
  std::vector<Action> decisions;
  bool first = true;
  for (;;) {
    HandTotal t = hand_total(cards);
    if (t.bust()) break;
    if (t.best == 21) {
      decisions.push_back(Action::Stand);
      break;
    }
    PlayContext ctx;
    ctx.first_decision = first && cards.size() == 2;
    ctx.can_double = ctx.first_decision && (!in_split || rules.double_after_split);
    ctx.can_split = false;  // split handled one level up
    Action a = policy_decide(policy, cards, upcard, ctx, rng);
    decisions.push_back(a);
    first = false;
    switch (a) {
      case Action::Hit:
        cards.push_back(shoe.draw());
        break;
      case Action::Stand:
        return decisions;
      case Action::DoubleDown:
        if (!ctx.can_double) throw std::logic_error("double when not allowed");
        doubled = true;
        cards.push_back(shoe.draw());
        return decisions;
      case Action::Split:
        throw std::logic_error("split decision reached hand play");
    }
  }
  return decisions;
}

inline void play_seat(SeatRecord& seat, Rank upcard, const Policy& policy, Shoe& shoe,
                      const RuleConfig& rules, Rng& rng) {
  if (is_natural(seat.cards)) return;  // settled against the dealer later

  HandTotal t = hand_total(seat.cards);
  bool pair = seat.cards.size() == 2 && seat.cards[0] == seat.cards[1];
  if (pair && t.best < 21) {
    PlayContext ctx{true, true, true};
    Action a = policy_decide(policy, seat.cards, upcard, ctx, rng);
    if (a == Action::Split) {
      seat.split = true;
      seat.decisions = {Action::Split};
      const bool aces = seat.cards[0] == kAce;
      for (Rank start : seat.cards) {
        SplitHand hand;
        hand.cards = {start, shoe.draw()};
        // split aces take one card each and stop
        if (!aces)
          hand.decisions = run_decisions(hand.cards, upcard, policy, shoe, rules, rng,
                                         true, hand.doubled);
        seat.split_hands.push_back(std::move(hand));
      }
      return;
    }
  }
  seat.decisions = run_decisions(seat.cards, upcard, policy, shoe, rules, rng, false,
                                 seat.doubled);
}

}  // namespace detail

/// Deals, plays and settles one round, one policy per seat. The shoe must be
/// rich enough for the round; auto-reshuffling shoes always are. Dealer
/// naturals are found by peek before anyone acts; the hole card always ends
/// up on record because the dealer exposes it when the round ends.
inline HandRecord play_hand(Shoe& shoe, const RuleConfig& rules,
                            const std::vector<const Policy*>& policies,
                            const std::vector<SeatPlan>& plans, Rng& rng,
                            std::string hand_id = "", bool shuffled_before = false) {
  if (plans.empty()) throw std::domain_error("play_hand: no seats");
  if (policies.size() != plans.size())
    throw std::domain_error("play_hand: one policy per seat");
  HandRecord rec;
  rec.hand_id = std::move(hand_id);
  rec.shuffle_before = shuffled_before;
  for (const auto& plan : plans) {
    SeatRecord seat;
    seat.seat = plan.seat;
    seat.player_id = plan.player_id.empty() ? "p" + std::to_string(plan.seat)
                                            : plan.player_id;
    seat.bet = plan.bet;
    seat.side_bet = plan.side_bet;
    seat.chips = chip_breakdown(plan.bet);
    rec.seats.push_back(std::move(seat));
  }

  for (auto& seat : rec.seats) seat.cards.push_back(shoe.draw());
  rec.dealer.upcard = shoe.draw();
  for (auto& seat : rec.seats) seat.cards.push_back(shoe.draw());
  rec.dealer.hole = shoe.draw();

  const bool dealer_natural = is_natural({rec.dealer.upcard, rec.dealer.hole});
  if (dealer_natural) {
    for (auto& seat : rec.seats) {
      seat.outcome = is_natural(seat.cards) ? Outcome::Push : Outcome::Loss;
      seat.net = settle(*seat.outcome, seat.bet, false, rules);
    }
    return rec;
  }

  for (std::size_t i = 0; i < rec.seats.size(); ++i)
    detail::play_seat(rec.seats[i], rec.dealer.upcard, *policies[i], shoe, rules, rng);

  bool any_live = false;
  for (const auto& seat : rec.seats) {
    if (seat.split) {
      for (const auto& h : seat.split_hands)
        any_live |= !hand_total(h.cards).bust();
    } else {
      any_live |= !hand_total(seat.cards).bust() && !is_natural(seat.cards);
    }
  }

  std::vector<Rank> dealer_cards{rec.dealer.upcard, rec.dealer.hole};
  if (any_live) {
    dealer_cards = dealer_play(dealer_cards, shoe, rules);
    rec.dealer.draws.assign(dealer_cards.begin() + 2, dealer_cards.end());
  }
  const HandTotal dealer_total = hand_total(dealer_cards);

  for (auto& seat : rec.seats) {
    if (seat.split) {
      seat.net = 0;
      for (auto& h : seat.split_hands) {
        // split hands never count as naturals, so the card count passed in
        // is anything above two
        h.outcome = adjudicate(hand_total(h.cards), 3, dealer_total);
        h.net = settle(h.outcome, seat.bet, h.doubled, rules);
        seat.net += h.net;
      }
    } else {
      seat.outcome = adjudicate(hand_total(seat.cards),
                                static_cast<int>(seat.cards.size()), dealer_total);
      seat.net = settle(*seat.outcome, seat.bet, seat.doubled, rules);
    }
  }
  return rec;
}

inline HandRecord play_hand(Shoe& shoe, const RuleConfig& rules, const Policy& policy,
                            const std::vector<SeatPlan>& plans, Rng& rng,
                            std::string hand_id = "", bool shuffled_before = false) {
  std::vector<const Policy*> policies(plans.size(), &policy);
  return play_hand(shoe, rules, policies, plans, rng, std::move(hand_id),
                   shuffled_before);
}

}  // namespace pitboss
