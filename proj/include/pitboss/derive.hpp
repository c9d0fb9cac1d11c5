#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "pitboss/rng.hpp"
#include "pitboss/rules.hpp"
#include "pitboss/strategy.hpp"

namespace pitboss {

/// Monte-Carlo derivation of a strategy table: every cell gets each legal
/// opening action tried many times, with the rest of the hand played by the
/// canonical chart, and keeps the argmax.

struct DeriveConfig {
  RuleConfig rules;
  std::uint64_t hands_per_cell = 20000;  // trials per legal action per cell
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CellEstimate {
  double ev[4] = {std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};  // indexed by Action
  Action best = Action::Stand;
  double margin = 0;  // best EV minus runner-up EV

  double ev_of(Action a) const { return ev[static_cast<int>(a)]; }
  bool legal(Action a) const { return !std::isnan(ev_of(a)); }
};

struct DerivedStrategy {
  StrategyTable table;
  std::array<CellEstimate, kTableRows * 10> cells;

  const CellEstimate& cell(const HandClass& hc, int upcard_value) const {
    return cells[strategy_row(hc) * 10 + upcard_value - 1];
  }
};

namespace detail {

/// Cards are tracked by blackjack value only; suits and face identities do
/// not move any EV here.
using ValuePool = std::vector<std::uint8_t>;

inline ValuePool pool_for_cell(const RuleConfig& rules,
                               const std::array<int, 3>& removed) {
  std::array<int, 11> counts{};
  for (int v = 2; v <= 9; ++v) counts[v] = 4 * rules.deck_count;
  counts[1] = 4 * rules.deck_count;
  counts[10] = 16 * rules.deck_count;
  for (int v : removed) {
    if (v == 0) continue;
    if (counts[v] == 0) throw std::domain_error("derive: cell removes too many cards");
    counts[v] -= 1;
  }
  ValuePool pool;
  pool.reserve(52 * rules.deck_count);
  for (int v = 1; v <= 10; ++v)
    pool.insert(pool.end(), counts[v], static_cast<std::uint8_t>(v));
  return pool;
}

struct PoolCursor {
  const ValuePool* pool;
  std::size_t next = 0;
  Rank draw() {
    if (next >= pool->size()) throw std::domain_error("derive: pool exhausted");
    return static_cast<Rank>((*pool)[next++]);
  }
};

/// Picks the dealer hole card: the first card in the permutation that does
/// not complete a natural. Skipped cards stay available for later draws.
inline Rank draw_hole(PoolCursor& cur, std::vector<Rank>& skipped, int upcard) {
  const bool peeking = upcard == 1 || upcard == 10;
  while (true) {
    Rank hole = cur.draw();
    if (!peeking || card_value(hole) + upcard != 11) return hole;
    skipped.push_back(hole);
  }
}

inline int dealer_total(int upcard, Rank hole, PoolCursor& cur,
                        std::vector<Rank>& skipped, const RuleConfig& rules) {
  std::vector<Rank> cards{static_cast<Rank>(upcard), hole};
  std::size_t reuse = 0;
  auto next = [&]() -> Rank {
    if (reuse < skipped.size()) return skipped[reuse++];
    return cur.draw();
  };
  while (true) {
    HandTotal t = hand_total(cards);
    if (t.bust()) return 22;
    if (t.best > 17) return t.best;
    if (t.best == 17 && !(t.soft && rules.dealer_hits_soft_17)) return t.best;
    cards.push_back(next());
  }
}

/// Plays a hand to completion with the chart, hit/stand only.
inline HandTotal chart_play_out(std::vector<Rank> cards, int upcard,
                                const StrategyTable& chart, PoolCursor& cur) {
  PlayContext ctx{false, false, false};
  while (true) {
    HandTotal t = hand_total(cards);
    if (t.bust() || t.best >= 21) return t;
    if (lookup_action(chart, cards, static_cast<Rank>(upcard), ctx) != Action::Hit)
      return t;
    cards.push_back(cur.draw());
  }
}

inline double settle_unit(const HandTotal& player, int dealer) {
  if (player.bust()) return -1;
  if (dealer == 22) return 1;
  if (player.best > dealer) return 1;
  if (player.best < dealer) return -1;
  return 0;
}

struct CellSpec {
  std::array<Rank, 2> cards;
  int upcard = 2;
  bool can_split = false;
  bool hard_row = false;  // evaluate {10,10} as hard 20, not as a pair
};

/// One trial of one action over a fixed shoe permutation.
inline double trial_ev(const CellSpec& spec, Action a, const StrategyTable& chart,
                       const RuleConfig& rules, PoolCursor cur) {
  std::vector<Rank> skipped;
  const Rank hole = draw_hole(cur, skipped, spec.upcard);
  std::vector<Rank> cards(spec.cards.begin(), spec.cards.end());

  switch (a) {
    case Action::Stand: {
      HandTotal t = hand_total(cards);
      return settle_unit(t, dealer_total(spec.upcard, hole, cur, skipped, rules));
    }
    case Action::Hit: {
      cards.push_back(cur.draw());
      HandTotal t = chart_play_out(cards, spec.upcard, chart, cur);
      if (t.bust()) return -1;
      return settle_unit(t, dealer_total(spec.upcard, hole, cur, skipped, rules));
    }
    case Action::DoubleDown: {
      cards.push_back(cur.draw());
      HandTotal t = hand_total(cards);
      if (t.bust()) return -2;
      return 2 * settle_unit(t, dealer_total(spec.upcard, hole, cur, skipped, rules));
    }
    case Action::Split: {
      const bool aces = spec.cards[0] == 1;
      std::array<HandTotal, 2> totals;
      for (int h = 0; h < 2; ++h) {
        std::vector<Rank> hand{spec.cards[0], cur.draw()};
        totals[h] = aces ? hand_total(hand)
                         : chart_play_out(hand, spec.upcard, chart, cur);
      }
      const bool any_live = !totals[0].bust() || !totals[1].bust();
      int dealer = 22;
      if (any_live) dealer = dealer_total(spec.upcard, hole, cur, skipped, rules);
      double net = 0;
      for (const auto& t : totals)
        net += t.bust() ? -1 : settle_unit(t, dealer);
      return net;
    }
  }
  return 0;
}

inline CellSpec cell_spec(int row, int upcard_value) {
  const HandClass hc = row_class(row);
  CellSpec spec;
  spec.upcard = upcard_value;
  switch (hc.kind) {
    case HandClass::Kind::Hard: {
      spec.hard_row = true;
      if (hc.value >= 20) {
        spec.cards = {10, 10};  // the only two-card hard 20
      } else {
        // placeholder; real composition chosen per trial
        const int a = std::min(10, hc.value - 2);
        spec.cards = {static_cast<Rank>(a), static_cast<Rank>(hc.value - a)};
      }
      break;
    }
    case HandClass::Kind::Soft:
      spec.cards = {1, static_cast<Rank>(hc.value - 11)};
      break;
    case HandClass::Kind::Pair: {
      const Rank v = static_cast<Rank>(card_value(static_cast<Rank>(hc.value)));
      spec.cards = {v, v};
      spec.can_split = true;
      break;
    }
  }
  return spec;
}

/// Non-pair two-card ways to make a hard total (aces always read soft on two
/// cards, so none appear here).
inline std::vector<std::array<Rank, 2>> hard_compositions(int total) {
  std::vector<std::array<Rank, 2>> out;
  for (int a = 2; a <= 10; ++a) {
    const int b = total - a;
    if (b <= a || b > 10) continue;
    out.push_back({static_cast<Rank>(a), static_cast<Rank>(b)});
  }
  if (out.empty()) out.push_back({10, 10});
  return out;
}

inline CellEstimate derive_cell(int row, int upcard_value, const DeriveConfig& cfg,
                                const StrategyTable& chart) {
  CellSpec spec = cell_spec(row, upcard_value);
  const auto compositions = spec.hard_row && spec.cards[0] != spec.cards[1]
                                ? hard_compositions(row_class(row).value)
                                : std::vector<std::array<Rank, 2>>{spec.cards};

  std::vector<Action> actions{Action::Stand, Action::Hit, Action::DoubleDown};
  if (spec.can_split) actions.push_back(Action::Split);

  Rng rng(derive_seed(cfg.seed, 0xD000u + static_cast<std::uint64_t>(row) * 16 +
                                    static_cast<std::uint64_t>(upcard_value)));
  std::array<double, 4> sums{};
  std::vector<ValuePool> pools;
  pools.reserve(compositions.size());
  for (const auto& comp : compositions)
    pools.push_back(detail::pool_for_cell(
        cfg.rules, {card_value(comp[0]), card_value(comp[1]), spec.upcard}));

  // hard totals mix compositions as often as the shoe actually deals them
  std::vector<std::uint32_t> cumulative;
  std::uint32_t weight_sum = 0;
  for (const auto& comp : compositions) {
    const std::uint32_t wa = comp[0] == 10 ? 16 : 4;
    const std::uint32_t wb = comp[1] == 10 ? 16 : 4;
    weight_sum += wa * wb;
    cumulative.push_back(weight_sum);
  }

  ValuePool deck;
  for (std::uint64_t i = 0; i < cfg.hands_per_cell; ++i) {
    std::size_t pick = 0;
    if (compositions.size() > 1) {
      const std::uint32_t roll = rng.below(weight_sum);
      while (cumulative[pick] <= roll) ++pick;
    }
    spec.cards = compositions[pick];
    deck = pools[pick];
    for (std::size_t k = deck.size(); k > 1; --k)
      std::swap(deck[k - 1], deck[rng.below(static_cast<std::uint32_t>(k))]);
    for (Action a : actions) {
      PoolCursor cur{&deck, 0};
      sums[static_cast<int>(a)] += trial_ev(spec, a, chart, cfg.rules, cur);
    }
  }

  CellEstimate est;
  double best = -std::numeric_limits<double>::infinity();
  double second = best;
  for (Action a : actions) {
    const double v = sums[static_cast<int>(a)] / double(cfg.hands_per_cell);
    est.ev[static_cast<int>(a)] = v;
    if (v > best) {
      second = best;
      best = v;
      est.best = a;
    } else if (v > second) {
      second = v;
    }
  }
  est.margin = best - second;
  return est;
}

}  // namespace detail

inline DerivedStrategy derive_strategy(const DeriveConfig& cfg) {
  if (cfg.hands_per_cell == 0)
    throw std::domain_error("derive: hands_per_cell must be positive");
  cfg.rules.validate();
  const StrategyTable& chart = canonical_basic_table();
  DerivedStrategy out;

  const int total_cells = kTableRows * 10;
  std::atomic<int> next{0};
  auto work = [&]() {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= total_cells) return;
      const int row = idx / 10;
      const int up = idx % 10 + 1;
      out.cells[idx] = detail::derive_cell(row, up, cfg, chart);
    }
  };

  const int workers = std::max(1, cfg.threads);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (int row = 0; row < kTableRows; ++row)
    for (int up = 1; up <= 10; ++up)
      out.table.set(row_class(row), up, out.cells[row * 10 + up - 1].best);
  out.table.set_provenance("derived seed=" + std::to_string(cfg.seed) +
                           " hands_per_cell=" + std::to_string(cfg.hands_per_cell));
  return out;
}

/// Cell-level agreement between two tables, skipping cells whose EV race was
/// inside the near-tie margin.
struct AgreementReport {
  int compared = 0;
  int agreed = 0;
  int near_ties = 0;
  double fraction() const { return compared ? double(agreed) / compared : 1.0; }
};

inline AgreementReport table_agreement(const DerivedStrategy& derived,
                                       const StrategyTable& reference,
                                       double tie_margin = 0.01) {
  AgreementReport rep;
  for (int row = 0; row < kTableRows; ++row) {
    for (int up = 1; up <= 10; ++up) {
      const CellEstimate& est = derived.cells[row * 10 + up - 1];
      if (est.margin < tie_margin) {
        rep.near_ties += 1;
        continue;
      }
      rep.compared += 1;
      if (derived.table.at(row_class(row), up) == reference.at(row_class(row), up))
        rep.agreed += 1;
    }
  }
  return rep;
}

}  // namespace pitboss
