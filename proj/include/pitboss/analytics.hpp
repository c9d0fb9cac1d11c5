#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pitboss/counting.hpp"
#include "pitboss/hand_record.hpp"
#include "pitboss/simulate.hpp"
#include "pitboss/strategy.hpp"

namespace pitboss {

// ---------------------------------------------------------------------------
// Hold as a linear function of the scaled count.

struct HoldModel {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;

  /// Scaled count at which the table stops making money off this player.
  double zero_crossing() const {
    if (slope == 0) throw std::domain_error("hold model: flat line has no crossing");
    return -intercept / slope;
  }
};

/// Fit published for a comparable table; kept as the reference point the
/// simulated curve is compared against.
inline constexpr HoldModel kReferenceHoldModel{-0.00474, 0.00512, 0.98326};

inline double expected_hold(const HoldModel& m, double scaled_count) {
  return m.slope * scaled_count + m.intercept;
}

inline HoldModel fit_hold_model(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::domain_error("hold model fit: need at least two points");
  double sx = 0, sy = 0;
  for (auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0) throw std::domain_error("hold model fit: all x identical");
  HoldModel m;
  m.slope = sxy / sxx;
  m.intercept = my - m.slope * mx;
  if (syy == 0) {
    m.r_squared = 1;  // a constant fit through constant data is exact
  } else {
    double ss_res = 0;
    for (auto& [x, y] : points) {
      const double e = y - expected_hold(m, x);
      ss_res += e * e;
    }
    m.r_squared = 1 - ss_res / syy;
  }
  return m;
}

/// Sample correlation; empty when either side has no variance.
inline std::optional<double> pearson(const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::domain_error("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Cumulative holds over a sequence of hands.

struct CumulativeHolds {
  double h_player = 0;   // bet-weighted: what the table actually kept
  double h_flatbet = 0;  // what it would have kept had the bets been level
};

/// Bet-weighted and flat-bet cumulative holds over (bet, hold) pairs.
/// Constant bets make the two identical by algebra, so that case returns a
/// literal zero difference instead of round-off noise.
inline CumulativeHolds cumulative_holds(
    const std::vector<std::pair<double, double>>& bets_and_holds) {
  if (bets_and_holds.empty()) throw std::domain_error("cumulative holds: no hands");
  double bet_sum = 0, weighted = 0, hold_sum = 0;
  bool constant = true;
  for (auto& [bet, hold] : bets_and_holds) {
    if (bet <= 0) throw std::domain_error("cumulative holds: bet must be positive");
    constant &= bet == bets_and_holds.front().first;
    bet_sum += bet;
    weighted += bet * hold;
    hold_sum += hold;
  }
  CumulativeHolds out;
  const double n = static_cast<double>(bets_and_holds.size());
  out.h_flatbet = constant ? hold_sum / n : (bet_sum / n) * hold_sum / bet_sum;
  out.h_player = constant ? out.h_flatbet : weighted / bet_sum;
  return out;
}

/// Prefix series of the two cumulative holds, one entry per hand. This is the
/// data behind the "advantage isolated by bet sizing" plot.
inline std::vector<CumulativeHolds> cumulative_series(
    const std::vector<std::pair<double, double>>& bets_and_holds) {
  std::vector<CumulativeHolds> out;
  out.reserve(bets_and_holds.size());
  double bet_sum = 0, weighted = 0, hold_sum = 0;
  bool constant = true;
  for (std::size_t i = 0; i < bets_and_holds.size(); ++i) {
    auto& [bet, hold] = bets_and_holds[i];
    if (bet <= 0) throw std::domain_error("cumulative holds: bet must be positive");
    constant &= bet == bets_and_holds.front().first;
    bet_sum += bet;
    weighted += bet * hold;
    hold_sum += hold;
    CumulativeHolds h;
    const double n = static_cast<double>(i + 1);
    h.h_flatbet = constant ? hold_sum / n : (bet_sum / n) * hold_sum / bet_sum;
    h.h_player = constant ? h.h_flatbet : weighted / bet_sum;
    out.push_back(h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Betting behavior against the count.

struct CountingAssessment {
  std::optional<double> correlation;  // bet vs scaled count; empty for level bets
  double advantage = 0;               // h_flatbet − h_player: edge bought by ramping
  bool flagged = false;
};

/// Flags a bettor whose sizing tracks the count and bought a real edge.
/// Needs a minimum sample; short stretches say nothing about intent.
inline CountingAssessment assess_counting(
    const std::vector<double>& scaled_counts,
    const std::vector<std::pair<double, double>>& bets_and_holds,
    double correlation_min = 0.5, double advantage_min = 0.001) {
  if (scaled_counts.size() != bets_and_holds.size())
    throw std::domain_error("counting assessment: length mismatch");
  if (scaled_counts.size() < 10)
    throw std::domain_error("counting assessment: need at least 10 hands");
  CountingAssessment out;
  const CumulativeHolds h = cumulative_holds(bets_and_holds);
  out.advantage = h.h_flatbet - h.h_player;
  std::vector<double> bets;
  bets.reserve(bets_and_holds.size());
  for (auto& [bet, hold] : bets_and_holds) bets.push_back(bet);
  out.correlation = pearson(scaled_counts, bets);
  out.flagged = out.correlation.has_value() && *out.correlation >= correlation_min &&
                out.advantage >= advantage_min;
  return out;
}

// ---------------------------------------------------------------------------
// Decision scoring against the chart.

struct DeviationCell {
  std::string cell;  // e.g. "H16 vs 10"
  Action took = Action::Stand;
  Action ideal = Action::Stand;
  int count = 0;
};

struct SkillReport {
  int scored = 0;   // hands whose opening decision was evaluated
  int matched = 0;  // of those, how many played the chart
  int excluded_unknown = 0;  // hands dropped for unreadable cards
  int seats_skipped = 0;     // hands dropped as structurally off
  std::vector<DeviationCell> deviations;
  std::map<int, std::map<Action, int>> observed;  // cell key -> action histogram

  double score() const {
    return scored ? static_cast<double>(matched) / scored : 0.0;
  }
  std::string label() const {
    if (!scored) return "unknown";
    const double s = score();
    if (s >= 0.95) return "expert";
    if (s >= 0.85) return "skilled";
    if (s >= 0.70) return "average";
    return "novice";
  }
};

namespace detail {

inline bool cards_known(const std::vector<Rank>& cards) {
  return std::all_of(cards.begin(), cards.end(), rank_valid);
}

inline void note_deviation(SkillReport& report, const HandClass& hc, Rank upcard,
                           Action took, Action ideal) {
  const std::string cell =
      row_label(hc) + " vs " + rank_name(static_cast<Rank>(card_value(upcard)));
  for (auto& d : report.deviations) {
    if (d.cell == cell && d.took == took && d.ideal == ideal) {
      d.count += 1;
      return;
    }
  }
  report.deviations.push_back({cell, took, ideal, 1});
}

/// Walks one decision trail. Only the opening call is scored; the rest are
/// folded into the observed-habit histogram so the empirical policy can use
/// them.
inline void walk_decisions(SkillReport& report, const StrategyTable& chart,
                           const std::vector<Rank>& cards,
                           const std::vector<Action>& decisions, Rank upcard,
                           bool in_split, bool score_first, const RuleConfig& rules) {
  if (cards.size() < 2) {
    report.seats_skipped += 1;
    return;
  }
  std::vector<Rank> state(cards.begin(), cards.begin() + 2);
  std::size_t next_card = 2;
  bool first = true;
  for (Action took : decisions) {
    const HandTotal t = hand_total(state);
    if (t.bust()) {
      report.seats_skipped += 1;  // a decision after busting is not a real trail
      return;
    }
    if (t.best < 21) {
      const int key = Policy::cell_key(classify_hand(state), card_value(upcard));
      report.observed[key][took] += 1;
      if (first && score_first) {
        PlayContext ctx;
        ctx.first_decision = true;
        ctx.can_double = !in_split || rules.double_after_split;
        ctx.can_split = !in_split;
        const Action ideal = lookup_action(chart, state, upcard, ctx);
        report.scored += 1;
        if (took == ideal)
          report.matched += 1;
        else
          note_deviation(report, classify_hand(state), upcard, took, ideal);
      }
    }
    first = false;
    if (took == Action::Hit) {
      if (next_card >= cards.size()) {
        report.seats_skipped += 1;  // record claims a hit but shows no card
        return;
      }
      state.push_back(cards[next_card++]);
    } else {
      break;  // stand and double end the trail
    }
  }
}

}  // namespace detail

/// Scores one seat's opening decision against the chart and records the rest
/// of its decision trail as observed habit.
inline void score_seat(SkillReport& report, const StrategyTable& chart,
                       const SeatRecord& seat, Rank upcard, const RuleConfig& rules) {
  if (!rank_valid(upcard) || !detail::cards_known(seat.cards)) {
    report.excluded_unknown += 1;
    return;
  }
  for (const auto& h : seat.split_hands) {
    if (!detail::cards_known(h.cards)) {
      report.excluded_unknown += 1;
      return;
    }
  }
  if (seat.split) {
    if (seat.cards.size() != 2 || seat.cards[0] != seat.cards[1]) {
      report.seats_skipped += 1;
      return;
    }
    // splitting was the opening decision on the pair
    PlayContext ctx{true, true, true};
    const Action ideal = lookup_action(chart, seat.cards, upcard, ctx);
    const int key = Policy::cell_key(classify_hand(seat.cards), card_value(upcard));
    report.scored += 1;
    report.observed[key][Action::Split] += 1;
    if (ideal == Action::Split)
      report.matched += 1;
    else
      detail::note_deviation(report, classify_hand(seat.cards), upcard,
                             Action::Split, ideal);
    for (const auto& h : seat.split_hands)
      detail::walk_decisions(report, chart, h.cards, h.decisions, upcard, true, false,
                             rules);
  } else {
    detail::walk_decisions(report, chart, seat.cards, seat.decisions, upcard, false,
                           true, rules);
  }
}

/// How much faster this player loses than a chart player, from the observed
/// per-cell habits. 1.0 means plays like the book.
inline double skill_theo_multiplier(const SkillReport& report,
                                    const StrategyTable& chart, const RuleConfig& rules,
                                    std::uint64_t hands, std::uint64_t seed) {
  if (hands == 0 || report.observed.empty()) return 1.0;
  Policy empirical;
  empirical.kind = PolicyKind::Empirical;
  empirical.name = "observed";
  empirical.table = &chart;
  for (const auto& [key, histogram] : report.observed) {
    auto best = histogram.begin();
    for (auto it = histogram.begin(); it != histogram.end(); ++it)
      if (it->second > best->second) best = it;
    empirical.cells[key] = best->first;
  }
  SimConfig cfg;
  cfg.rules = rules;
  cfg.hands = hands;
  cfg.seed = seed;
  SimResult observed = simulate(cfg, empirical);
  Policy bybook = make_policy("basic", chart);
  SimResult book = simulate(cfg, bybook);
  const double book_theo = book.theo_per_hour(100);
  const double observed_theo = observed.theo_per_hour(100);
  if (book_theo <= 0) return 1.0;  // too little baseline signal to scale by
  return std::max(observed_theo / book_theo, 0.0);
}

struct SkillEvaluation {
  SkillReport report;
  double theo_multiplier = 1.0;
};

/// Scores every seat in the records against the chart, then estimates the
/// cost of the observed habits by simulation.
inline SkillEvaluation skill_evaluate(const std::vector<HandRecord>& records,
                                      const StrategyTable& chart,
                                      const RuleConfig& rules,
                                      std::uint64_t sim_hands = 200000,
                                      std::uint64_t seed = 97) {
  SkillEvaluation out;
  for (const auto& rec : records) {
    if (!rec.complete) continue;
    for (const auto& seat : rec.seats)
      score_seat(out.report, chart, seat, rec.dealer.upcard, rules);
  }
  out.theo_multiplier =
      skill_theo_multiplier(out.report, chart, rules, sim_hands, seed);
  return out;
}

// ---------------------------------------------------------------------------
// Per-player roll-up over a stretch of records.

struct SeatSample {
  double scaled = 0;   // count the player saw before the deal
  double bet = 0;      // opening bet
  double wagered = 0;  // includes doubles and splits
  double net = 0;
  double hold() const { return -net / wagered; }
};

struct PlayerPersona {
  std::string player_id;
  int hands = 0;
  double total_bet = 0;
  double total_wagered = 0;
  double net = 0;
  double avg_bet = 0;
  CumulativeHolds holds;
  CountingAssessment counting;
  SkillReport skill;
  double theo_multiplier = 1.0;
  double est_theo_per_hour = 0;
  std::vector<SeatSample> samples;  // per hand, in table order
};

struct AnalyticsOptions {
  RuleConfig rules;
  double correlation_min = 0.5;
  double advantage_min = 0.001;
  std::uint64_t multiplier_hands = 200000;  // 0 skips the habit simulation
  std::uint64_t seed = 97;
  double hands_per_hour = 100;
};

struct TableAnalysis {
  std::vector<PlayerPersona> players;
  int records_used = 0;
  int records_skipped = 0;
};

/// Replays the count through the records in order, attributes hands to
/// players, and rolls up betting and decision behavior per player. Skill is
/// scored against the given chart.
inline TableAnalysis analyze_records(const std::vector<HandRecord>& records,
                                     const StrategyTable& chart,
                                     const AnalyticsOptions& opts) {
  struct Tally {
    std::vector<double> scaled;
    std::vector<std::pair<double, double>> bets_and_holds;
    PlayerPersona persona;
  };
  std::map<std::string, Tally> tallies;

  TableAnalysis out;
  CountState count;
  count.decks_total = opts.rules.deck_count;
  for (const auto& rec : records) {
    if (rec.shuffle_before) count.reset();
    // a stream missing its shuffle markers would otherwise run the count dry
    if (count.decks_remaining() <= 0.5) count.reset();
    if (!rec.complete) {
      out.records_skipped += 1;
      for (Rank r : rec.all_cards())
        if (rank_valid(r)) high_low_update(count, r);
      continue;
    }
    const double scaled = count.scaled();
    for (const auto& seat : rec.seats) {
      if (seat.bet <= 0 || seat.wagered() <= 0) continue;
      const std::string id =
          seat.player_id.empty() ? "p" + std::to_string(seat.seat) : seat.player_id;
      Tally& tally = tallies[id];
      tally.persona.player_id = id;
      tally.persona.hands += 1;
      tally.persona.total_bet += seat.bet;
      tally.persona.total_wagered += seat.wagered();
      tally.persona.net += seat.net;
      tally.scaled.push_back(scaled);
      // pairs are (opening bet, hold on that bet): doubles and splits change
      // the money at risk but not the wager the bet-ramp analysis keys on
      tally.bets_and_holds.push_back({seat.bet, -seat.net / seat.bet});
      tally.persona.samples.push_back(
          {scaled, seat.bet, seat.wagered(), seat.net});
      score_seat(tally.persona.skill, chart, seat, rec.dealer.upcard, opts.rules);
    }
    for (Rank r : rec.all_cards())
      if (rank_valid(r)) high_low_update(count, r);
    out.records_used += 1;
  }

  for (auto& [id, tally] : tallies) {
    PlayerPersona& p = tally.persona;
    p.avg_bet = p.hands ? p.total_bet / p.hands : 0;
    p.holds = cumulative_holds(tally.bets_and_holds);
    if (tally.scaled.size() >= 10) {
      p.counting = assess_counting(tally.scaled, tally.bets_and_holds,
                                   opts.correlation_min, opts.advantage_min);
    } else {
      p.counting.advantage = p.holds.h_flatbet - p.holds.h_player;
      p.counting.correlation = std::nullopt;
      p.counting.flagged = false;
    }
    p.theo_multiplier = skill_theo_multiplier(p.skill, chart, opts.rules,
                                              opts.multiplier_hands,
                                              derive_seed(opts.seed, 0x5e5));
    p.est_theo_per_hour =
        p.holds.h_player * p.avg_bet * opts.hands_per_hour * p.theo_multiplier;
    out.players.push_back(std::move(p));
  }
  return out;
}

inline TableAnalysis analyze_records(const std::vector<HandRecord>& records,
                                     const AnalyticsOptions& opts = {}) {
  return analyze_records(records, canonical_basic_table(), opts);
}

inline json to_json(const PlayerPersona& p) {
  json deviations = json::array();
  for (const auto& d : p.skill.deviations)
    deviations.push_back(json{{"cell", d.cell},
                              {"took", to_string(d.took)},
                              {"ideal", to_string(d.ideal)},
                              {"count", d.count}});
  json out{{"player_id", p.player_id},
           {"hands_played", p.hands},
           {"average_bet", p.avg_bet},
           {"total_wagered", p.total_wagered},
           {"net", p.net},
           {"hold_player", p.holds.h_player},
           {"hold_flatbet", p.holds.h_flatbet},
           {"skill_score", p.skill.score()},
           {"skill_label", p.skill.label()},
           {"skill_decisions_scored", p.skill.scored},
           {"skill_deviations", deviations},
           {"skill_theo_multiplier", p.theo_multiplier},
           {"counting_advantage", p.counting.advantage},
           {"counting_flagged", p.counting.flagged},
           {"est_theo_per_hour", p.est_theo_per_hour}};
  if (p.counting.correlation)
    out["counting_correlation"] = *p.counting.correlation;
  else
    out["counting_correlation"] = nullptr;
  return out;
}

}  // namespace pitboss
