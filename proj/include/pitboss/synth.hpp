#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pitboss/config.hpp"
#include "pitboss/events.hpp"
#include "pitboss/play.hpp"
#include "pitboss/simulate.hpp"

namespace pitboss {

/// Renders ground-truth hands into the detection-stream schema with
/// configurable imperfections. Geometry is schematic: fixed anchors on a
/// 2000x1000 table, just enough structure for the spatial rules to hold.

struct NoiseProfile {
  double frame_drop_rate = 0;
  int reorder_window = 0;
  double rank_confusion_rate = 0;
  double chip_count_jitter_rate = 0;
  double orientation_flip_rate = 0;
  double phantom_rate = 0;
  std::uint64_t seed = 0;

  void validate() const {
    const double rates[] = {frame_drop_rate, rank_confusion_rate,
                            chip_count_jitter_rate, orientation_flip_rate,
                            phantom_rate};
    for (double r : rates)
      if (r < 0 || r >= 1) throw std::domain_error("noise: rates must be in [0,1)");
    if (reorder_window < 0) throw std::domain_error("noise: negative reorder window");
  }
};

inline NoiseProfile noise_from_kv(const KeyValueFile& kv) {
  NoiseProfile n;
  n.frame_drop_rate = kv.get_double("frame_drop_rate", n.frame_drop_rate);
  n.reorder_window = static_cast<int>(kv.get_int("reorder_window", n.reorder_window));
  n.rank_confusion_rate = kv.get_double("rank_confusion_rate", n.rank_confusion_rate);
  n.chip_count_jitter_rate =
      kv.get_double("chip_count_jitter_rate", n.chip_count_jitter_rate);
  n.orientation_flip_rate =
      kv.get_double("orientation_flip_rate", n.orientation_flip_rate);
  n.phantom_rate = kv.get_double("phantom_rate", n.phantom_rate);
  n.seed = static_cast<std::uint64_t>(
      kv.get_int("seed", static_cast<std::int64_t>(n.seed)));
  n.validate();
  return n;
}

namespace layout {

inline constexpr int kCardW = 60;
inline constexpr int kCardH = 90;
inline constexpr int kSeatY = 700;
inline constexpr int kChipY = 560;
inline constexpr int kChipSize = 40;
inline constexpr int kDealerX = 1000;
inline constexpr int kDealerY = 300;
inline constexpr int kHoleOffset = 70;   // hole card sits left of the upcard
inline constexpr int kFanStep = 22;      // player cards fan right
inline constexpr int kSplitFanStep = 18;
inline constexpr int kSplitOffset = 90;  // split piles straddle the seat anchor

inline int seat_x(int seat) { return 250 * seat; }

/// Dealer draw gaps shrink as cards squeeze into the rail: 90, 72, 58, ...
inline int next_draw_gap(int gap) {
  return std::max(8, std::min(gap - 1, static_cast<int>(std::lround(gap * 0.8))));
}

inline int draw_x(int draw_index) {
  int x = kDealerX;
  int gap = 90;
  for (int k = 0; k <= draw_index; ++k) {
    x += gap;
    gap = next_draw_gap(gap);
  }
  return x;
}

}  // namespace layout

struct RenderTiming {
  std::int64_t betting_ms = 3000;
  std::int64_t per_card_ms = 700;
  std::int64_t think_ms = 1500;
  std::int64_t reveal_ms = 1000;
  std::int64_t draw_ms = 800;
  std::int64_t settle_ms = 1500;
  std::int64_t between_hands_ms = 1000;
};

namespace detail {

struct Scene {
  std::vector<CardObject> cards;
  std::vector<ChipObject> chips;
};

struct Keyframe {
  std::int64_t ts;
  Scene scene;
};

class HandScript {
 public:
  HandScript(const HandRecord& truth, const RenderTiming& timing)
      : truth_(truth), timing_(timing) {
    build();
  }

  const std::vector<Keyframe>& keyframes() const { return keyframes_; }
  std::int64_t end_ts() const { return end_ts_; }
  std::int64_t chipboard_end() const { return chipboard_end_; }

  const Scene& scene_at(std::int64_t ts) const {
    const Scene* best = &keyframes_.front().scene;
    for (const auto& kf : keyframes_) {
      if (kf.ts > ts) break;
      best = &kf.scene;
    }
    return *best;
  }

 private:
  void commit() { keyframes_.push_back({t_, scene_}); }

  void place_bet(int seat, const std::map<std::string, int>& chips, int layer) {
    int x = layout::seat_x(seat) - 60;
    for (const auto& [color, count] : chips) {
      ChipObject c;
      c.color = color;
      c.count = count;
      c.bet_area = "p" + std::to_string(seat) + "_main";
      c.bbox = {x, layout::kChipY - 12 * layer, layout::kChipSize, layout::kChipSize};
      c.conf = 0.91;
      scene_.chips.push_back(c);
      x += 45;
    }
  }

  void place_card(const std::string& location, int x, int y, Rank rank,
                  bool horizontal) {
    CardObject c;
    c.rank = rank;
    c.horizontal = horizontal;
    c.location = location;
    const int w = horizontal ? layout::kCardH : layout::kCardW;
    const int h = horizontal ? layout::kCardW : layout::kCardH;
    c.bbox = {x, y, w, h};
    c.conf = 0.94;
    scene_.cards.push_back(c);
  }

  void seat_card(int seat, int slot, Rank rank, bool horizontal = false) {
    place_card("p" + std::to_string(seat),
               layout::seat_x(seat) + slot * layout::kFanStep, layout::kSeatY, rank,
               horizontal);
  }

  void pile_card(int seat, int pile, int slot, Rank rank) {
    const int base = layout::seat_x(seat) +
                     (pile == 0 ? -layout::kSplitOffset : layout::kSplitOffset);
    place_card("p" + std::to_string(seat) + (pile == 0 ? "a" : "b"),
               base + slot * layout::kSplitFanStep, layout::kSeatY, rank, false);
  }

  void dealer_card(Rank rank, int x) {
    place_card("dealer", x, layout::kDealerY, rank, false);
  }

  void build() {
    t_ = 0;
    for (const auto& seat : truth_.seats) place_bet(seat.seat, seat.chips, 0);
    commit();

    t_ = timing_.betting_ms;
    for (const auto& seat : truth_.seats) {
      t_ += timing_.per_card_ms;
      seat_card(seat.seat, 0, seat.cards[0]);
      commit();
    }
    t_ += timing_.per_card_ms;
    dealer_card(truth_.dealer.upcard, layout::kDealerX);
    commit();
    for (const auto& seat : truth_.seats) {
      t_ += timing_.per_card_ms;
      seat_card(seat.seat, 1, seat.cards[1]);
      commit();
    }
    t_ += timing_.per_card_ms;  // hole dealt face down: nothing to detect yet
    chipboard_end_ = t_ + timing_.think_ms;

    const bool dealer_natural =
        is_natural({truth_.dealer.upcard, truth_.dealer.hole});
    if (dealer_natural) {
      t_ += timing_.per_card_ms;
      dealer_card(truth_.dealer.hole, layout::kDealerX - layout::kHoleOffset);
      commit();
    } else {
      for (const auto& seat : truth_.seats) replay_seat(seat);
      t_ += timing_.reveal_ms;
      dealer_card(truth_.dealer.hole, layout::kDealerX - layout::kHoleOffset);
      commit();
      for (std::size_t k = 0; k < truth_.dealer.draws.size(); ++k) {
        t_ += timing_.draw_ms;
        dealer_card(truth_.dealer.draws[k], layout::draw_x(static_cast<int>(k)));
        commit();
      }
    }
    t_ += timing_.settle_ms;
    end_ts_ = t_;
  }

  void replay_seat(const SeatRecord& seat) {
    if (seat.split) {
      t_ += timing_.think_ms;
      // the pair separates into two piles
      const std::string loc = "p" + std::to_string(seat.seat);
      std::erase_if(scene_.cards,
                    [&](const CardObject& c) { return c.location == loc; });
      pile_card(seat.seat, 0, 0, seat.split_hands[0].cards[0]);
      pile_card(seat.seat, 1, 0, seat.split_hands[1].cards[0]);
      commit();
      for (int h = 0; h < 2; ++h) {
        const SplitHand& sub = seat.split_hands[h];
        t_ += timing_.per_card_ms;
        pile_card(seat.seat, h, 1, sub.cards[1]);
        commit();
        int slot = 2;
        for (Action d : sub.decisions) {
          t_ += timing_.think_ms;
          if (d == Action::Hit) {
            pile_card(seat.seat, h, slot, sub.cards[slot]);
            slot += 1;
            commit();
          }
        }
      }
      return;
    }
    int slot = 2;
    for (Action d : seat.decisions) {
      t_ += timing_.think_ms;
      if (d == Action::Hit) {
        seat_card(seat.seat, slot, seat.cards[slot]);
        slot += 1;
        commit();
      } else if (d == Action::DoubleDown) {
        seat_card(seat.seat, slot, seat.cards[slot], true);
        place_bet(seat.seat, seat.chips, 1);
        slot += 1;
        commit();
      }
    }
  }

  const HandRecord& truth_;
  const RenderTiming& timing_;
  Scene scene_;
  std::vector<Keyframe> keyframes_;
  std::int64_t t_ = 0;
  std::int64_t end_ts_ = 0;
  std::int64_t chipboard_end_ = 0;
};

inline void apply_frame_noise(FrameEvent& frame, const NoiseProfile& noise, Rng& rng) {
  for (auto& card : frame.cards) {
    if (noise.rank_confusion_rate > 0 && rng.chance(noise.rank_confusion_rate)) {
      const Rank wrong = static_cast<Rank>(1 + rng.below(13));
      card.rank = wrong == card.rank ? static_cast<Rank>(wrong % 13 + 1) : wrong;
    }
    if (noise.orientation_flip_rate > 0 && rng.chance(noise.orientation_flip_rate))
      card.horizontal = !card.horizontal;
  }
  for (auto& chip : frame.chips) {
    if (noise.chip_count_jitter_rate > 0 && rng.chance(noise.chip_count_jitter_rate))
      chip.count = std::max(1, chip.count + (rng.chance(0.5) ? 1 : -1));
  }
  if (noise.phantom_rate > 0 && rng.chance(noise.phantom_rate)) {
    CardObject ghost;
    ghost.rank = static_cast<Rank>(1 + rng.below(13));
    const int seat = 1 + static_cast<int>(rng.below(7));
    ghost.location = rng.chance(0.3) ? "dealer" : "p" + std::to_string(seat);
    const int x = ghost.location == "dealer" ? layout::kDealerX + 200
                                             : layout::seat_x(seat) + 120;
    ghost.bbox = {x, ghost.location == "dealer" ? layout::kDealerY : layout::kSeatY,
                  layout::kCardW, layout::kCardH};
    ghost.conf = 0.5;
    frame.cards.push_back(ghost);
  }
}

}  // namespace detail

struct RenderedHand {
  std::vector<StreamItem> items;
  std::uint64_t next_index = 0;
  std::int64_t next_ts = 0;
};

/// Renders one hand into frames and control lines. Controls are never
/// dropped or noised; they come from the pit's own state machine, not from
/// the detector.
inline RenderedHand render_stream(const HandRecord& truth, int fps,
                                  const NoiseProfile& noise,
                                  const RenderTiming& timing = {},
                                  std::uint64_t first_index = 0,
                                  std::int64_t ts0 = 0,
                                  std::uint64_t noise_stream = 0) {
  if (fps <= 0 || fps > 1000) throw std::domain_error("render: fps out of range");
  noise.validate();
  if (truth.seats.empty()) throw std::domain_error("render: hand has no seats");
  for (const auto& seat : truth.seats)
    if (seat.cards.size() < 2 && !seat.split)
      throw std::domain_error("render: seat with fewer than two cards");

  detail::HandScript script(truth, timing);
  const std::int64_t period = 1000 / fps;
  Rng rng(derive_seed(noise.seed, noise_stream));

  RenderedHand out;
  std::uint64_t index = first_index;
  ControlEvent start;
  start.event = "hand_start";
  start.index = index++;
  start.ts = ts0;
  start.hand_id = truth.hand_id;
  start.shuffle = truth.shuffle_before;
  out.items.push_back(start);

  for (std::int64_t t = 0; t <= script.end_ts(); t += period) {
    const detail::Scene& scene = script.scene_at(t);

    FrameEvent top;
    top.index = index++;
    top.ts = ts0 + t;
    top.viewpoint = "overhead";
    top.camera = "cam-top";
    top.cards = scene.cards;
    top.chips = scene.chips;
    const bool drop_top = noise.frame_drop_rate > 0 && rng.chance(noise.frame_drop_rate);
    detail::apply_frame_noise(top, noise, rng);
    if (!drop_top) out.items.push_back(top);

    if (t < script.chipboard_end()) {
      FrameEvent bets;
      bets.index = index++;
      bets.ts = ts0 + t;
      bets.viewpoint = "chipboard";
      bets.camera = "cam-bets";
      bets.chips = scene.chips;
      const bool drop_bets =
          noise.frame_drop_rate > 0 && rng.chance(noise.frame_drop_rate);
      detail::apply_frame_noise(bets, noise, rng);
      if (!drop_bets) out.items.push_back(bets);
    }
  }

  ControlEvent end;
  end.event = "hand_end";
  end.index = index++;
  end.ts = ts0 + script.end_ts();
  end.hand_id = truth.hand_id;
  out.items.push_back(end);
  out.next_index = index;
  out.next_ts = ts0 + script.end_ts() + timing.between_hands_ms;
  return out;
}

/// Bounded shuffle: emission order is permuted inside consecutive windows,
/// so no item lands more than reorder_window slots from home.
inline void reorder_stream(std::vector<StreamItem>& items, int window, Rng& rng) {
  if (window <= 1) return;
  std::size_t begin = 0;
  while (begin < items.size()) {
    const std::size_t end = std::min(begin + static_cast<std::size_t>(window),
                                     items.size());
    for (std::size_t k = end - begin; k > 1; --k) {
      const std::size_t j = begin + rng.below(static_cast<std::uint32_t>(k));
      std::swap(items[begin + k - 1], items[j]);
    }
    begin = end;
  }
}

struct PlayerSpec {
  int seat = 1;
  std::string player_id;
  std::string policy = "basic";
  BetMode bet_mode = BetMode::Flat;
  double bet = 25;
  double bet_max = 300;
};

struct SynthConfig {
  RuleConfig rules;
  std::vector<PlayerSpec> players{PlayerSpec{}};
  int hands = 10;
  int fps = 10;
  std::uint64_t seed = 7;
  NoiseProfile noise;
  RenderTiming timing;
  std::string session_id = "s1";
};

struct SynthResult {
  std::vector<StreamItem> stream;  // header first
  std::vector<HandRecord> truth;
};

/// Plays a session and renders it as one continuous detection stream.
inline SynthResult synth_session(const SynthConfig& cfg) {
  if (cfg.hands <= 0) throw std::domain_error("synth: hands must be positive");
  if (cfg.players.empty()) throw std::domain_error("synth: no players");
  cfg.rules.validate();
  cfg.noise.validate();

  const StrategyTable& chart = canonical_basic_table();
  std::vector<Policy> policies;
  policies.reserve(cfg.players.size());
  for (const auto& p : cfg.players) policies.push_back(make_policy(p.policy, chart));
  std::vector<const Policy*> policy_ptrs;
  for (const auto& p : policies) policy_ptrs.push_back(&p);

  Rng rng(derive_seed(cfg.seed, 0));
  Shoe shoe(cfg.rules.deck_count, derive_seed(cfg.seed, 1), cfg.rules.penetration);
  CountState count;
  count.decks_total = cfg.rules.deck_count;

  SynthResult out;
  out.stream.push_back(StreamHeader{kStreamSchema, cfg.fps});
  std::uint64_t index = 1;
  std::int64_t ts = 0;

  for (int i = 0; i < cfg.hands; ++i) {
    bool shuffled = i == 0;
    if (shoe.needs_shuffle()) {
      shoe.shuffle();
      shuffled = true;
    }
    if (shuffled) count.reset();
    const double scaled = count.scaled();

    std::vector<SeatPlan> plans;
    plans.reserve(cfg.players.size());
    for (const auto& p : cfg.players) {
      SeatPlan plan;
      plan.seat = p.seat;
      plan.player_id = p.player_id;
      plan.bet = p.bet_mode == BetMode::Flat ? p.bet
                                             : spread_bet(scaled, p.bet, p.bet_max);
      plans.push_back(plan);
    }

    HandRecord rec =
        play_hand(shoe, cfg.rules, policy_ptrs, plans, rng,
                  cfg.session_id + ":h" + std::to_string(i), shuffled);
    for (Rank r : rec.all_cards()) high_low_update(count, r);

    RenderedHand rendered =
        render_stream(rec, cfg.fps, cfg.noise, cfg.timing, index, ts,
                      static_cast<std::uint64_t>(i) + 1);
    for (auto& item : rendered.items) out.stream.push_back(std::move(item));
    index = rendered.next_index;
    ts = rendered.next_ts;
    out.truth.push_back(std::move(rec));
  }

  if (cfg.noise.reorder_window > 1) {
    Rng shuffle_rng(derive_seed(cfg.noise.seed, 0x5eed));
    std::vector<StreamItem> body(out.stream.begin() + 1, out.stream.end());
    reorder_stream(body, cfg.noise.reorder_window, shuffle_rng);
    std::copy(body.begin(), body.end(), out.stream.begin() + 1);
  }
  return out;
}

}  // namespace pitboss
