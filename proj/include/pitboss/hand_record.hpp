#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pitboss/cards.hpp"
#include "pitboss/rules.hpp"
#include "pitboss/strategy.hpp"

namespace pitboss {

using nlohmann::json;

/// Chip colors on the felt and their dollar values.
inline const std::map<std::string, int>& chip_values() {
  static const std::map<std::string, int> v{
      {"blue", 1}, {"red", 5}, {"green", 25}, {"black", 100}};
  return v;
}

/// Greedy largest-first chip breakdown of a whole-dollar amount.
inline std::map<std::string, int> chip_breakdown(double amount) {
  if (amount <= 0 || std::floor(amount) != amount)
    throw std::domain_error("chip_breakdown: amount must be a positive whole number");
  int left = static_cast<int>(amount);
  std::map<std::string, int> out;
  for (auto color : {"black", "green", "red", "blue"}) {
    int value = chip_values().at(color);
    if (left >= value) {
      out[color] = left / value;
      left %= value;
    }
  }
  return out;
}

inline double chip_total(const std::map<std::string, int>& chips) {
  double total = 0;
  for (auto& [color, count] : chips) {
    auto it = chip_values().find(color);
    if (it == chip_values().end())
      throw std::domain_error("chip_total: unknown color " + color);
    if (count < 0) throw std::domain_error("chip_total: negative stack");
    total += it->second * count;
  }
  return total;
}

/// One post-split hand. Split hands can never be naturals and only double
/// when the rules allow it.
struct SplitHand {
  std::vector<Rank> cards;
  std::vector<Action> decisions;
  bool doubled = false;
  Outcome outcome = Outcome::Push;
  double net = 0;

  bool operator==(const SplitHand&) const = default;
};

struct SeatRecord {
  int seat = 1;
  std::string player_id;
  double bet = 0;
  bool side_bet = false;
  std::map<std::string, int> chips;
  std::vector<Rank> cards;        // the pre-split pair when split
  std::vector<Action> decisions;  // just {Split} when split
  bool doubled = false;
  bool split = false;
  std::vector<SplitHand> split_hands;
  std::optional<Outcome> outcome;  // absent while unresolved or when split
  double net = 0;
  std::vector<std::string> flags;

  double wagered() const {
    if (!split) return doubled ? 2 * bet : bet;
    double w = 0;
    for (const auto& h : split_hands) w += h.doubled ? 2 * bet : bet;
    return w;
  }
};

struct DealerRecord {
  Rank upcard = 0;
  Rank hole = 0;  // 0 = never revealed
  std::vector<Rank> draws;

  std::vector<Rank> cards() const {
    std::vector<Rank> c;
    if (upcard) c.push_back(upcard);
    if (hole) c.push_back(hole);
    c.insert(c.end(), draws.begin(), draws.end());
    return c;
  }

  bool operator==(const DealerRecord&) const = default;
};

/// Everything the table produced for one dealt round.
struct HandRecord {
  std::string hand_id;
  bool complete = true;
  bool shuffle_before = false;
  DealerRecord dealer;
  std::vector<SeatRecord> seats;
  std::vector<std::string> flags;

  double net() const {
    double n = 0;
    for (const auto& s : seats) n += s.net;
    return n;
  }
  double wagered() const {
    double w = 0;
    for (const auto& s : seats) w += s.wagered();
    return w;
  }
  std::vector<Rank> all_cards() const {
    std::vector<Rank> c = dealer.cards();
    for (const auto& s : seats) {
      if (s.split) {
        c.insert(c.end(), s.cards.begin(), s.cards.end());
        for (const auto& h : s.split_hands)
          // the pair cards already counted once each; skip the first card of
          // each split hand, it came from the pair
          c.insert(c.end(), h.cards.begin() + 1, h.cards.end());
      } else {
        c.insert(c.end(), s.cards.begin(), s.cards.end());
      }
    }
    return c;
  }
};

// --------------------------------------------------------------------------
// JSON round trip. One record per JSONL line.

inline json decisions_to_json(const std::vector<Action>& ds) {
  json a = json::array();
  for (auto d : ds) a.push_back(to_string(d));
  return a;
}

inline std::vector<Action> decisions_from_json(const json& a) {
  std::vector<Action> ds;
  for (const auto& d : a) ds.push_back(action_from_string(d.get<std::string>()));
  return ds;
}

inline json to_json(const SplitHand& h) {
  return json{{"cards", h.cards},
              {"decisions", decisions_to_json(h.decisions)},
              {"doubled", h.doubled},
              {"outcome", to_string(h.outcome)},
              {"net", h.net}};
}

inline SplitHand split_hand_from_json(const json& j) {
  SplitHand h;
  h.cards = j.at("cards").get<std::vector<Rank>>();
  h.decisions = decisions_from_json(j.at("decisions"));
  h.doubled = j.at("doubled").get<bool>();
  h.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  h.net = j.at("net").get<double>();
  return h;
}

inline json to_json(const SeatRecord& s) {
  json j{{"seat", s.seat},       {"player_id", s.player_id},
         {"bet", s.bet},         {"side_bet", s.side_bet},
         {"cards", s.cards},     {"decisions", decisions_to_json(s.decisions)},
         {"doubled", s.doubled}, {"split", s.split},
         {"net", s.net}};
  if (!s.chips.empty()) j["chips"] = s.chips;
  if (s.split) {
    json hs = json::array();
    for (const auto& h : s.split_hands) hs.push_back(to_json(h));
    j["hands"] = hs;
  }
  if (s.outcome) j["outcome"] = to_string(*s.outcome);
  if (!s.flags.empty()) j["flags"] = s.flags;
  return j;
}

inline SeatRecord seat_from_json(const json& j) {
  SeatRecord s;
  s.seat = j.at("seat").get<int>();
  s.player_id = j.value("player_id", "");
  s.bet = j.at("bet").get<double>();
  s.side_bet = j.value("side_bet", false);
  if (j.contains("chips")) s.chips = j.at("chips").get<std::map<std::string, int>>();
  s.cards = j.at("cards").get<std::vector<Rank>>();
  s.decisions = decisions_from_json(j.at("decisions"));
  s.doubled = j.value("doubled", false);
  s.split = j.value("split", false);
  if (s.split)
    for (const auto& h : j.at("hands")) s.split_hands.push_back(split_hand_from_json(h));
  if (j.contains("outcome"))
    s.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  s.net = j.at("net").get<double>();
  if (j.contains("flags")) s.flags = j.at("flags").get<std::vector<std::string>>();
  return s;
}

inline json to_json(const HandRecord& r) {
  json dealer{{"upcard", r.dealer.upcard}, {"draws", r.dealer.draws}};
  if (r.dealer.hole) dealer["hole"] = r.dealer.hole;
  json seats = json::array();
  for (const auto& s : r.seats) seats.push_back(to_json(s));
  json j{{"hand_id", r.hand_id},
         {"complete", r.complete},
         {"shuffle_before", r.shuffle_before},
         {"dealer", dealer},
         {"seats", seats}};
  if (!r.flags.empty()) j["flags"] = r.flags;
  return j;
}

inline HandRecord hand_record_from_json(const json& j) {
  HandRecord r;
  r.hand_id = j.at("hand_id").get<std::string>();
  r.complete = j.at("complete").get<bool>();
  r.shuffle_before = j.value("shuffle_before", false);
  const json& d = j.at("dealer");
  r.dealer.upcard = d.at("upcard").get<Rank>();
  r.dealer.hole = d.value("hole", Rank{0});
  r.dealer.draws = d.at("draws").get<std::vector<Rank>>();
  for (const auto& s : j.at("seats")) r.seats.push_back(seat_from_json(s));
  if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

inline void write_hand_records(std::ostream& out, const std::vector<HandRecord>& recs) {
  for (const auto& r : recs) out << to_json(r).dump() << '\n';
}

inline std::vector<HandRecord> read_hand_records(std::istream& in) {
  std::vector<HandRecord> recs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      recs.push_back(hand_record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("hand record line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return recs;
}

/// Equality on everything the table adjudicates by: bets, exact card
/// sequences, decisions, outcomes and money. Flags and player labels are
/// annotations, not game state, so they stay out of it.
inline bool same_play(const SeatRecord& a, const SeatRecord& b) {
  return a.seat == b.seat && a.bet == b.bet && a.side_bet == b.side_bet &&
         a.cards == b.cards && a.decisions == b.decisions && a.doubled == b.doubled &&
         a.split == b.split && a.split_hands == b.split_hands &&
         a.outcome == b.outcome && a.net == b.net;
}

inline bool same_play(const HandRecord& a, const HandRecord& b) {
  if (a.hand_id != b.hand_id || a.complete != b.complete ||
      a.shuffle_before != b.shuffle_before || !(a.dealer == b.dealer) ||
      a.seats.size() != b.seats.size())
    return false;
  for (std::size_t i = 0; i < a.seats.size(); ++i)
    if (!same_play(a.seats[i], b.seats[i])) return false;
  return true;
}

/// FNV-1a over the canonical JSON text; used to spot re-ingested hands.
inline std::uint64_t record_fingerprint(const HandRecord& r) {
  const std::string s = to_json(r).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Re-derives every settled amount from outcomes and rules; returns problems
/// found. Empty means money and totals are self-consistent.
inline std::vector<std::string> audit_record(const HandRecord& r,
                                             const RuleConfig& rules = RuleConfig{}) {
  std::vector<std::string> problems;
  auto complain = [&](const std::string& what) { problems.push_back(r.hand_id + ": " + what); };
  if (!r.dealer.upcard) complain("no dealer upcard");
  for (const auto& s : r.seats) {
    if (s.bet <= 0) complain("seat " + std::to_string(s.seat) + " bet not positive");
    if (!s.chips.empty() && chip_total(s.chips) != s.bet)
      complain("seat " + std::to_string(s.seat) + " chips disagree with bet");
    if (!r.complete) continue;
    if (s.split) {
      if (s.split_hands.size() != 2)
        complain("seat " + std::to_string(s.seat) + " split without two hands");
      double net = 0;
      for (const auto& h : s.split_hands) net += settle(h.outcome, s.bet, h.doubled, rules);
      if (!s.split_hands.empty() && net != s.net)
        complain("seat " + std::to_string(s.seat) + " split net mismatch");
    } else if (s.outcome) {
      if (settle(*s.outcome, s.bet, s.doubled, rules) != s.net)
        complain("seat " + std::to_string(s.seat) + " net mismatch");
      if (s.cards.size() < 2) complain("seat " + std::to_string(s.seat) + " too few cards");
    } else {
      complain("seat " + std::to_string(s.seat) + " complete but unresolved");
    }
  }
  return problems;
}

}  // namespace pitboss
