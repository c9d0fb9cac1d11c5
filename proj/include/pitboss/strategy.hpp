#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitboss/cards.hpp"
#include "pitboss/rng.hpp"
#include "pitboss/rules.hpp"

namespace pitboss {

enum class Action : std::uint8_t { Hit, Stand, DoubleDown, Split };

inline char action_code(Action a) {
  switch (a) {
    case Action::Hit: return 'H';
    case Action::Stand: return 'S';
    case Action::DoubleDown: return 'D';
    case Action::Split: return 'P';
  }
  throw std::logic_error("bad action");
}

inline std::string to_string(Action a) {
  switch (a) {
    case Action::Hit: return "hit";
    case Action::Stand: return "stand";
    case Action::DoubleDown: return "double";
    case Action::Split: return "split";
  }
  throw std::logic_error("bad action");
}

inline Action action_from_code(char c) {
  switch (c) {
    case 'H': return Action::Hit;
    case 'S': return Action::Stand;
    case 'D': return Action::DoubleDown;
    case 'P': return Action::Split;
    default: throw std::invalid_argument(std::string("unknown action code: ") + c);
  }
}

inline Action action_from_string(const std::string& s) {
  if (s == "hit") return Action::Hit;
  if (s == "stand") return Action::Stand;
  if (s == "double") return Action::DoubleDown;
  if (s == "split") return Action::Split;
  throw std::invalid_argument("unknown action: " + s);
}

/** Player hand classification for strategy lookup. Pairs win over soft:
    two aces classify as Pair(ace), not soft 12. */
struct HandClass {
  enum class Kind : std::uint8_t { Hard, Soft, Pair } kind = Kind::Hard;
  // Hard/Soft: best total. Pair: the paired rank (1..13).
  int value = 0;

  bool operator==(const HandClass&) const = default;
};

inline HandClass classify_hand(std::span<const Rank> cards) {
  if (cards.size() == 2 && cards[0] == cards[1])
    return {HandClass::Kind::Pair, static_cast<int>(cards[0])};
  HandTotal t = hand_total(cards);
  if (t.bust()) throw std::domain_error("cannot classify a busted hand");
  if (t.soft) return {HandClass::Kind::Soft, t.best};
  return {HandClass::Kind::Hard, t.best};
}

// Row layout: Hard 5..20, Soft 13..20, Pair A..K.
inline constexpr int kHardRows = 16;
inline constexpr int kSoftRows = 8;
inline constexpr int kPairRows = 13;
inline constexpr int kTableRows = kHardRows + kSoftRows + kPairRows;
inline constexpr int kTableCols = 10;  // dealer upcard value: ace=1 .. ten=10

inline int strategy_row(const HandClass& hc) {
  switch (hc.kind) {
    case HandClass::Kind::Hard:
      if (hc.value < 5 || hc.value > 20) throw std::out_of_range("hard row out of range");
      return hc.value - 5;
    case HandClass::Kind::Soft:
      if (hc.value < 13 || hc.value > 20) throw std::out_of_range("soft row out of range");
      return kHardRows + hc.value - 13;
    case HandClass::Kind::Pair:
      if (hc.value < 1 || hc.value > 13) throw std::out_of_range("pair row out of range");
      return kHardRows + kSoftRows + hc.value - 1;
  }
  throw std::logic_error("bad hand class");
}

inline HandClass row_class(int row) {
  if (row < 0 || row >= kTableRows) throw std::out_of_range("row out of range");
  if (row < kHardRows) return {HandClass::Kind::Hard, row + 5};
  if (row < kHardRows + kSoftRows) return {HandClass::Kind::Soft, row - kHardRows + 13};
  return {HandClass::Kind::Pair, row - kHardRows - kSoftRows + 1};
}

inline std::string row_label(const HandClass& hc) {
  switch (hc.kind) {
    case HandClass::Kind::Hard: return "H" + std::to_string(hc.value);
    case HandClass::Kind::Soft: return "S" + std::to_string(hc.value);
    case HandClass::Kind::Pair: return "P" + rank_name(static_cast<Rank>(hc.value));
  }
  throw std::logic_error("bad hand class");
}

inline HandClass class_from_label(const std::string& label) {
  if (label.size() < 2) throw std::invalid_argument("bad row label: " + label);
  char k = label[0];
  std::string rest = label.substr(1);
  if (k == 'H') return {HandClass::Kind::Hard, std::stoi(rest)};
  if (k == 'S') return {HandClass::Kind::Soft, std::stoi(rest)};
  if (k == 'P') {
    for (Rank r = 1; r <= 13; ++r)
      if (rank_name(r) == rest) return {HandClass::Kind::Pair, r};
    throw std::invalid_argument("bad pair label: " + label);
  }
  throw std::invalid_argument("bad row label: " + label);
}

/** Full decision chart: one action per (hand class, dealer upcard value) cell. */
class StrategyTable {
 public:
  StrategyTable() { cells_.fill(Action::Stand); }

  Action at(const HandClass& hc, int upcard_value) const {
    return cells_[index(hc, upcard_value)];
  }
  void set(const HandClass& hc, int upcard_value, Action a) {
    cells_[index(hc, upcard_value)] = a;
  }

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  bool operator==(const StrategyTable& o) const { return cells_ == o.cells_; }

  /** Emits the chart as CSV. Columns run dealer 2..10 then ace. */
  std::string to_csv() const {
    std::ostringstream out;
    out << "class,2,3,4,5,6,7,8,9,10,A\n";
    for (int row = 0; row < kTableRows; ++row) {
      HandClass hc = row_class(row);
      out << row_label(hc);
      for (int col = 0; col < kTableCols; ++col)
        out << ',' << action_code(cells_[row * kTableCols + col_to_value(col) - 1]);
      out << '\n';
    }
    return out.str();
  }

  static StrategyTable from_csv(const std::string& text) {
    StrategyTable table;
    std::array<bool, kTableRows> seen{};
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty strategy csv");
    if (split_csv(line) != std::vector<std::string>{"class", "2", "3", "4", "5", "6",
                                                    "7", "8", "9", "10", "A"})
      throw std::invalid_argument("bad strategy csv header: " + line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = split_csv(line);
      if (fields.size() != kTableCols + 1)
        throw std::invalid_argument("bad strategy csv row: " + line);
      HandClass hc = class_from_label(fields[0]);
      int row = strategy_row(hc);
      if (seen[row]) throw std::invalid_argument("duplicate strategy row: " + fields[0]);
      seen[row] = true;
      for (int col = 0; col < kTableCols; ++col) {
        if (fields[col + 1].size() != 1)
          throw std::invalid_argument("bad strategy cell: " + fields[col + 1]);
        table.cells_[row * kTableCols + col_to_value(col) - 1] =
            action_from_code(fields[col + 1][0]);
      }
    }
    for (int row = 0; row < kTableRows; ++row)
      if (!seen[row]) throw std::invalid_argument("missing strategy row: " + row_label(row_class(row)));
    return table;
  }

 private:
  static std::size_t index(const HandClass& hc, int upcard_value) {
    if (upcard_value < 1 || upcard_value > 10)
      throw std::out_of_range("upcard value out of range");
    return static_cast<std::size_t>(strategy_row(hc)) * kTableCols + upcard_value - 1;
  }

  // CSV column position (0-based, after the label) to upcard value.
  static int col_to_value(int col) { return col == 9 ? 1 : col + 2; }

  static std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
      if (c == ',') { out.push_back(cur); cur.clear(); }
      else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
  }

  std::array<Action, kTableRows * kTableCols> cells_;
  std::string provenance_ = "unspecified";
};

// Multi-deck chart for dealer stand on soft 17, no double after split.
inline constexpr const char* kCanonicalBasicCsv =
    "class,2,3,4,5,6,7,8,9,10,A\n"
    "H5,H,H,H,H,H,H,H,H,H,H\n"
    "H6,H,H,H,H,H,H,H,H,H,H\n"
    "H7,H,H,H,H,H,H,H,H,H,H\n"
    "H8,H,H,H,H,H,H,H,H,H,H\n"
    "H9,H,D,D,D,D,H,H,H,H,H\n"
    "H10,D,D,D,D,D,D,D,D,H,H\n"
    "H11,D,D,D,D,D,D,D,D,D,H\n"
    "H12,H,H,S,S,S,H,H,H,H,H\n"
    "H13,S,S,S,S,S,H,H,H,H,H\n"
    "H14,S,S,S,S,S,H,H,H,H,H\n"
    "H15,S,S,S,S,S,H,H,H,H,H\n"
    "H16,S,S,S,S,S,H,H,H,H,H\n"
    "H17,S,S,S,S,S,S,S,S,S,S\n"
    "H18,S,S,S,S,S,S,S,S,S,S\n"
    "H19,S,S,S,S,S,S,S,S,S,S\n"
    "H20,S,S,S,S,S,S,S,S,S,S\n"
    "S13,H,H,H,D,D,H,H,H,H,H\n"
    "S14,H,H,H,D,D,H,H,H,H,H\n"
    "S15,H,H,D,D,D,H,H,H,H,H\n"
    "S16,H,H,D,D,D,H,H,H,H,H\n"
    "S17,H,D,D,D,D,H,H,H,H,H\n"
    "S18,S,D,D,D,D,S,S,H,H,H\n"
    "S19,S,S,S,S,S,S,S,S,S,S\n"
    "S20,S,S,S,S,S,S,S,S,S,S\n"
    "PA,P,P,P,P,P,P,P,P,P,P\n"
    "P2,H,H,P,P,P,P,H,H,H,H\n"
    "P3,H,H,P,P,P,P,H,H,H,H\n"
    "P4,H,H,H,H,H,H,H,H,H,H\n"
    "P5,D,D,D,D,D,D,D,D,H,H\n"
    "P6,H,P,P,P,P,H,H,H,H,H\n"
    "P7,P,P,P,P,P,P,H,H,H,H\n"
    "P8,P,P,P,P,P,P,P,P,P,P\n"
    "P9,P,P,P,P,P,S,P,P,S,S\n"
    "P10,S,S,S,S,S,S,S,S,S,S\n"
    "PJ,S,S,S,S,S,S,S,S,S,S\n"
    "PQ,S,S,S,S,S,S,S,S,S,S\n"
    "PK,S,S,S,S,S,S,S,S,S,S\n";

inline const StrategyTable& canonical_basic_table() {
  static const StrategyTable table = [] {
    StrategyTable t = StrategyTable::from_csv(kCanonicalBasicCsv);
    t.set_provenance("canonical");
    return t;
  }();
  return table;
}

/** What the player may legally do right now. */
struct PlayContext {
  bool first_decision = true;   // exactly two cards, no prior action
  bool can_double = true;
  bool can_split = false;
};

/** Table lookup with legality fallbacks applied:
    - three or more cards: a DoubleDown cell plays as Hit
    - split unavailable for a pair: reclassified as the equivalent hard or
      soft hand (tiny totals below the chart floor just hit)
    - double unavailable on two cards: Hit, except soft 18+ stands */
inline Action lookup_action(const StrategyTable& table, std::span<const Rank> cards,
                            Rank dealer_upcard, const PlayContext& ctx) {
  if (cards.size() < 2) throw std::domain_error("lookup needs at least two cards");
  int up = card_value(dealer_upcard);
  HandClass hc = classify_hand(cards);
  if (hc.kind == HandClass::Kind::Pair && !(ctx.first_decision && ctx.can_split)) {
    HandTotal t = hand_total(cards);
    hc = t.soft ? HandClass{HandClass::Kind::Soft, t.best}
                : HandClass{HandClass::Kind::Hard, t.best};
    if ((hc.kind == HandClass::Kind::Hard && hc.value < 5) ||
        (hc.kind == HandClass::Kind::Soft && hc.value < 13))
      return Action::Hit;
  }
  Action a = table.at(hc, up);
  if (a == Action::Split && !(ctx.first_decision && ctx.can_split)) {
    // Defensive: a custom chart may mark split outside pair rows.
    a = Action::Hit;
  }
  if (a == Action::DoubleDown) {
    if (!ctx.first_decision) return Action::Hit;
    if (!ctx.can_double) {
      HandTotal t = hand_total(cards);
      return (t.soft && t.best >= 18) ? Action::Stand : Action::Hit;
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// Playing policies for the simulator.

enum class PolicyKind : std::uint8_t {
  Table,        // follow a strategy table
  Timid,        // table, but never doubles or splits
  MimicDealer,  // hit below 17, never double or split
  NeverBust,    // hit below hard 12 only
  AlwaysStand,  // stand on everything
  RandomLegal,  // uniform over the legal actions
  Empirical,    // observed per-cell modes, table fallback elsewhere
};

struct Policy {
  PolicyKind kind = PolicyKind::Table;
  std::string name = "basic";
  const StrategyTable* table = nullptr;  // Table, Timid, Empirical fallback
  std::map<int, Action> cells;           // Empirical: strategy_row*16+upcard

  static int cell_key(const HandClass& hc, int upcard_value) {
    return strategy_row(hc) * 16 + upcard_value;
  }
};

inline Action policy_decide(const Policy& policy, std::span<const Rank> cards,
                            Rank dealer_upcard, const PlayContext& ctx, Rng& rng) {
  HandTotal t = hand_total(cards);
  if (t.bust() || t.best >= 21) throw std::logic_error("decision requested past 21");
  switch (policy.kind) {
    case PolicyKind::Table:
      return lookup_action(*policy.table, cards, dealer_upcard, ctx);
    case PolicyKind::Timid: {
      PlayContext c = ctx;
      c.can_double = false;
      c.can_split = false;
      return lookup_action(*policy.table, cards, dealer_upcard, c);
    }
    case PolicyKind::MimicDealer:
      return t.best < 17 ? Action::Hit : Action::Stand;
    case PolicyKind::NeverBust:
      return (!t.soft && t.best < 12) ? Action::Hit : Action::Stand;
    case PolicyKind::AlwaysStand:
      return Action::Stand;
    case PolicyKind::RandomLegal: {
      std::vector<Action> legal{Action::Hit, Action::Stand};
      if (ctx.first_decision && ctx.can_double) legal.push_back(Action::DoubleDown);
      if (ctx.first_decision && ctx.can_split && cards.size() == 2 && cards[0] == cards[1])
        legal.push_back(Action::Split);
      return legal[rng.below(static_cast<std::uint32_t>(legal.size()))];
    }
    case PolicyKind::Empirical: {
      HandClass hc = classify_hand(cards);
      if (hc.kind == HandClass::Kind::Pair && !(ctx.first_decision && ctx.can_split)) {
        return lookup_action(*policy.table, cards, dealer_upcard, ctx);
      }
      auto it = policy.cells.find(Policy::cell_key(hc, card_value(dealer_upcard)));
      if (it == policy.cells.end())
        return lookup_action(*policy.table, cards, dealer_upcard, ctx);
      Action a = it->second;
      // Re-apply legality fallbacks to the observed action.
      if (a == Action::Split && !(ctx.first_decision && ctx.can_split &&
                                  cards.size() == 2 && cards[0] == cards[1]))
        a = Action::Hit;
      if (a == Action::DoubleDown && !(ctx.first_decision && ctx.can_double))
        a = (t.soft && t.best >= 18) ? Action::Stand : Action::Hit;
      return a;
    }
  }
  throw std::logic_error("bad policy kind");
}

inline Policy make_policy(const std::string& name, const StrategyTable& basic) {
  if (name == "basic") return {PolicyKind::Table, name, &basic, {}};
  if (name == "timid") return {PolicyKind::Timid, name, &basic, {}};
  if (name == "mimic-dealer") return {PolicyKind::MimicDealer, name, nullptr, {}};
  if (name == "never-bust") return {PolicyKind::NeverBust, name, nullptr, {}};
  if (name == "always-stand") return {PolicyKind::AlwaysStand, name, nullptr, {}};
  if (name == "random-legal") return {PolicyKind::RandomLegal, name, nullptr, {}};
  throw std::invalid_argument("unknown policy: " + name);
}

/** Default policy set for loss-rate reports. Kept to styles a seated human
    plausibly follows; the wilder menu entries (always-stand, random-legal,
    the stand-on-any-12 never-bust) distort comparisons and stay opt-in. */
inline std::vector<std::string> report_policy_names() {
  return {"basic", "timid", "mimic-dealer"};
}

inline std::vector<std::string> all_policy_names() {
  return {"basic", "timid", "never-bust", "mimic-dealer", "always-stand", "random-legal"};
}

}  // namespace pitboss
