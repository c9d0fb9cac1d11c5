#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pitboss/events.hpp"
#include "pitboss/hand_record.hpp"
#include "pitboss/rules.hpp"

namespace pitboss {

/// Fuses per-frame detections back into HandRecords. Frames may arrive out
/// of order and with gaps; a reorder buffer restores index order, then a
/// per-location stability vote rebuilds each hand.

struct AssimilatorConfig {
  RuleConfig rules;
  int max_lag = 20;           // reorder horizon, in stream indexes
  int stability_frames = 3;   // consecutive frames before a layout change is real
  double bet_frame_fraction = 0.7;  // chip stack must appear in this share of frames
  int inactivity_frames = 50;       // empty frames before an open hand is abandoned
  std::size_t max_diagnostics = 50;
};

/// Wrong stream schema version. Unlike a torn line this is not skippable:
/// every following line would be misread, so it aborts the ingest.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssimilateStats {
  std::uint64_t lines = 0;
  std::uint64_t frames = 0;
  std::uint64_t controls = 0;
  std::uint64_t malformed = 0;
  std::uint64_t late_dropped = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t orphan_frames = 0;  // frames outside any hand
  std::vector<std::string> diagnostics;
};

namespace detail {

struct SlotVotes {
  std::map<Rank, std::pair<int, double>> ranks;  // frames seen, confidence sum
  int horizontal = 0;
  int vertical = 0;
  std::uint64_t first_index = 0;
  bool seen = false;

  void observe(const CardObject& c, std::uint64_t index) {
    if (!seen) {
      first_index = index;
      seen = true;
    }
    auto& [frames, conf] = ranks[c.rank];
    frames += 1;
    conf += c.conf;
    (c.horizontal ? horizontal : vertical) += 1;
  }

  Rank rank() const {
    Rank best = 0;
    int best_frames = -1;
    double best_conf = 0;
    for (const auto& [r, v] : ranks) {
      const auto& [frames, conf] = v;
      const bool wins = frames > best_frames ||
                        (frames == best_frames && conf > best_conf) ||
                        (frames == best_frames && conf == best_conf && r < best);
      if (wins) {
        best = r;
        best_frames = frames;
        best_conf = conf;
      }
    }
    return best;
  }

  bool is_horizontal() const { return horizontal > vertical; }
};

struct LocationTrack {
  std::map<int, SlotVotes> by_x;
  std::vector<int> committed;
  std::vector<int> candidate;
  int candidate_run = 0;

  void observe(const std::vector<const CardObject*>& cards, std::uint64_t index,
               int stability) {
    std::vector<int> xs;
    xs.reserve(cards.size());
    for (const CardObject* c : cards) {
      by_x[c->bbox[0]].observe(*c, index);
      xs.push_back(c->bbox[0]);
    }
    std::sort(xs.begin(), xs.end());
    if (xs == committed) {
      candidate.clear();
      candidate_run = 0;
      return;
    }
    if (xs == candidate) {
      candidate_run += 1;
      if (candidate_run >= stability) {
        committed = xs;
        candidate.clear();
        candidate_run = 0;
      }
      return;
    }
    candidate = xs;
    candidate_run = 1;
  }

  /// Committed cards in x order, majority rank per slot.
  std::vector<Rank> cards() const {
    std::vector<Rank> out;
    out.reserve(committed.size());
    for (int x : committed) out.push_back(by_x.at(x).rank());
    return out;
  }
};

struct ChipVote {
  int frames = 0;
  double conf = 0;
};

struct OpenHand {
  std::string hand_id;
  bool shuffle = false;
  std::int64_t start_ts = 0;
  int chipboard_frames = 0;
  int overhead_frames = 0;
  int empty_run = 0;
  std::map<std::string, LocationTrack> tracks;
  // bet_area -> color -> stack count -> votes
  std::map<std::string, std::map<std::string, std::map<int, ChipVote>>> chip_votes;
};

}  // namespace detail

class Assimilator {
 public:
  explicit Assimilator(AssimilatorConfig cfg = {}) : cfg_(cfg) {
    cfg_.rules.validate();
  }

  void push_line(const std::string& line) {
    stats_.lines += 1;
    if (line.empty()) return;
    try {
      push(parse_stream_line(line));
    } catch (const SchemaError&) {
      throw;
    } catch (const std::runtime_error& e) {
      stats_.malformed += 1;
      diagnose("line " + std::to_string(stats_.lines) + ": " + e.what());
    }
  }

  void push(const StreamItem& item) {
    if (const auto* h = std::get_if<StreamHeader>(&item)) {
      if (h->schema != kStreamSchema)
        throw SchemaError("stream schema " + std::to_string(h->schema) +
                          " not supported");
      return;
    }
    const std::uint64_t index = std::holds_alternative<ControlEvent>(item)
                                    ? std::get<ControlEvent>(item).index
                                    : std::get<FrameEvent>(item).index;
    if (index < emit_floor_) {
      stats_.late_dropped += 1;
      return;
    }
    if (!pending_.emplace(index, item).second) {
      stats_.duplicates += 1;
      return;
    }
    max_seen_ = std::max(max_seen_, index);
    drain(false);
  }

  /// Flushes the reorder buffer and closes any hand left open.
  std::vector<HandRecord> finish() {
    drain(true);
    if (open_) close_hand(false, "truncated");
    return std::move(records_);
  }

  const std::vector<HandRecord>& records() const { return records_; }
  const AssimilateStats& stats() const { return stats_; }

 private:
  void diagnose(std::string msg) {
    if (stats_.diagnostics.size() < cfg_.max_diagnostics)
      stats_.diagnostics.push_back(std::move(msg));
  }

  void drain(bool all) {
    const std::uint64_t horizon =
        all ? std::numeric_limits<std::uint64_t>::max()
            : (max_seen_ > static_cast<std::uint64_t>(cfg_.max_lag)
                   ? max_seen_ - cfg_.max_lag
                   : 0);
    while (!pending_.empty() && pending_.begin()->first <= horizon) {
      auto node = pending_.extract(pending_.begin());
      emit_floor_ = std::max(emit_floor_, node.key() + 1);
      process(node.mapped());
    }
  }

  void process(const StreamItem& item) {
    if (const auto* c = std::get_if<ControlEvent>(&item)) {
      stats_.controls += 1;
      if (c->event == "hand_start") {
        if (open_) close_hand(false, "unterminated");
        open_.emplace();
        open_->hand_id = c->hand_id;
        open_->shuffle = c->shuffle;
        open_->start_ts = c->ts;
      } else {
        if (!open_ || open_->hand_id != c->hand_id) {
          diagnose("hand_end for unknown hand " + c->hand_id);
          return;
        }
        close_hand(true, "");
      }
      return;
    }
    observe(std::get<FrameEvent>(item));
  }

  void observe(const FrameEvent& frame) {
    stats_.frames += 1;
    if (!open_) {
      stats_.orphan_frames += 1;
      return;
    }
    if (frame.cards.empty() && frame.chips.empty()) {
      open_->empty_run += 1;
      if (open_->empty_run >= cfg_.inactivity_frames) {
        close_hand(false, "inactive");
        return;
      }
    } else {
      open_->empty_run = 0;
    }

    if (frame.viewpoint == "chipboard") {
      open_->chipboard_frames += 1;
      for (const auto& chip : frame.chips) {
        auto& vote = open_->chip_votes[chip.bet_area][chip.color][chip.count];
        vote.frames += 1;
        vote.conf += chip.conf;
      }
      return;
    }

    open_->overhead_frames += 1;
    std::map<std::string, std::vector<const CardObject*>> grouped;
    for (const auto& card : frame.cards) grouped[card.location].push_back(&card);
    // locations that vanished this frame still need the empty observation
    for (auto& [loc, track] : open_->tracks)
      if (!grouped.count(loc)) grouped[loc];
    for (auto& [loc, cards] : grouped)
      open_->tracks[loc].observe(cards, frame.index, cfg_.stability_frames);
  }

  /// Chip stacks that showed up in enough chipboard frames, mode count per
  /// color; ties go to higher summed confidence, then the lower count.
  std::map<std::string, int> vote_bet(const detail::OpenHand& hand,
                                      const std::string& area) const {
    std::map<std::string, int> chips;
    auto it = hand.chip_votes.find(area);
    if (it == hand.chip_votes.end()) return chips;
    const int needed = std::max(
        1, static_cast<int>(std::ceil(cfg_.bet_frame_fraction * hand.chipboard_frames)));
    for (const auto& [color, counts] : it->second) {
      int total = 0;
      for (const auto& [count, vote] : counts) total += vote.frames;
      if (total < needed) continue;
      int best_count = 0;
      const detail::ChipVote* best = nullptr;
      for (const auto& [count, vote] : counts) {
        const bool wins = !best || vote.frames > best->frames ||
                          (vote.frames == best->frames && vote.conf > best->conf) ||
                          (vote.frames == best->frames && vote.conf == best->conf &&
                           count < best_count);
        if (wins) {
          best = &vote;
          best_count = count;
        }
      }
      if (best_count > 0) chips[color] = best_count;
    }
    return chips;
  }

  /// Decision trail implied by the cards on the felt, matching how the
  /// simulator writes records: hits for extra cards, a stand on any
  /// voluntary stop, nothing after a bust, double as the lone decision.
  static std::vector<Action> infer_decisions(const std::vector<Rank>& cards,
                                             bool doubled, bool peek_ended,
                                             bool in_split) {
    std::vector<Action> out;
    if (peek_ended) return out;
    if (!in_split && cards.size() == 2 && is_natural(cards)) return out;
    if (in_split && cards.size() == 2 && cards[0] == kAce) return out;
    if (doubled) {
      out.push_back(Action::DoubleDown);
      return out;
    }
    for (std::size_t i = 2; i < cards.size(); ++i) out.push_back(Action::Hit);
    if (!hand_total(cards).bust()) out.push_back(Action::Stand);
    return out;
  }

  void close_hand(bool saw_end, const std::string& why) {
    detail::OpenHand hand = std::move(*open_);
    open_.reset();

    HandRecord rec;
    rec.hand_id = hand.hand_id;
    rec.shuffle_before = hand.shuffle;
    rec.complete = saw_end;
    if (!why.empty()) rec.flags.push_back(why);

    // dealer first: the settle step needs the full dealer hand
    bool peek_ended = false;
    std::vector<Rank> dealer_cards;
    auto dealer_track = hand.tracks.find("dealer");
    if (dealer_track != hand.tracks.end() && !dealer_track->second.committed.empty()) {
      const detail::LocationTrack& track = dealer_track->second;
      std::uint64_t earliest = std::numeric_limits<std::uint64_t>::max();
      int up_x = track.committed.front();
      for (int x : track.committed) {
        const detail::SlotVotes& votes = track.by_x.at(x);
        if (votes.first_index < earliest) {
          earliest = votes.first_index;
          up_x = x;
        }
      }
      rec.dealer.upcard = track.by_x.at(up_x).rank();
      std::vector<int> holes, draws;
      for (int x : track.committed) {
        if (x == up_x) continue;
        (x < up_x ? holes : draws).push_back(x);
      }
      if (holes.size() > 1) rec.flags.push_back("dealer_geometry");
      if (!holes.empty()) rec.dealer.hole = track.by_x.at(holes.back()).rank();
      int prev_gap = std::numeric_limits<int>::max();
      int prev_x = up_x;
      for (int x : draws) {
        const int gap = x - prev_x;
        if (gap >= prev_gap && rec.flags.empty()) rec.flags.push_back("dealer_geometry");
        prev_gap = gap;
        prev_x = x;
        rec.dealer.draws.push_back(track.by_x.at(x).rank());
      }
      dealer_cards.push_back(rec.dealer.upcard);
      if (rec.dealer.hole) dealer_cards.push_back(rec.dealer.hole);
      for (Rank r : rec.dealer.draws) dealer_cards.push_back(r);
      peek_ended = dealer_cards.size() == 2 && is_natural(dealer_cards);
    }

    // seats: anything with a voted bet or committed cards
    std::vector<int> seats;
    for (int s = 1; s <= 7; ++s) {
      const std::string base = "p" + std::to_string(s);
      const bool has_cards =
          (hand.tracks.count(base) && !hand.tracks[base].committed.empty()) ||
          (hand.tracks.count(base + "a") && !hand.tracks[base + "a"].committed.empty());
      const bool has_bet = !vote_bet(hand, base + "_main").empty();
      if (has_cards || has_bet) seats.push_back(s);
    }

    bool structure_ok = !dealer_cards.empty() && !seats.empty();
    for (int s : seats) {
      SeatRecord seat;
      seat.seat = s;
      const std::string base = "p" + std::to_string(s);
      seat.chips = vote_bet(hand, base + "_main");
      try {
        seat.bet = chip_total(seat.chips);
      } catch (const std::domain_error&) {
        seat.chips.clear();
        seat.bet = 0;
      }
      if (seat.bet <= 0) {
        rec.flags.push_back("missing_bet");
        structure_ok = false;
      }

      std::vector<Rank> base_cards, pile_a, pile_b;
      if (auto it = hand.tracks.find(base); it != hand.tracks.end())
        base_cards = it->second.cards();
      if (auto it = hand.tracks.find(base + "a"); it != hand.tracks.end())
        pile_a = it->second.cards();
      if (auto it = hand.tracks.find(base + "b"); it != hand.tracks.end())
        pile_b = it->second.cards();

      if (!pile_a.empty() && !pile_b.empty()) {
        seat.split = true;
        seat.decisions = {Action::Split};
        seat.cards = {pile_a[0], pile_b[0]};
        for (const std::vector<Rank>* pile : {&pile_a, &pile_b}) {
          SplitHand sub;
          sub.cards = *pile;
          if (sub.cards.size() < 2) structure_ok = false;
          sub.decisions = infer_decisions(sub.cards, false, peek_ended, true);
          seat.split_hands.push_back(std::move(sub));
        }
      } else {
        seat.cards = base_cards;
        if (seat.cards.size() < 2) {
          rec.flags.push_back("short_hand");
          structure_ok = false;
        } else {
          const detail::LocationTrack& track = hand.tracks[base];
          const bool third_horizontal =
              seat.cards.size() == 3 &&
              track.by_x.at(track.committed[2]).is_horizontal();
          seat.doubled = third_horizontal;
          seat.decisions =
              infer_decisions(seat.cards, seat.doubled, peek_ended, false);
        }
      }
      rec.seats.push_back(std::move(seat));
    }

    auto readable = [](const std::vector<Rank>& cards) {
      return std::all_of(cards.begin(), cards.end(), rank_valid);
    };
    if (!readable(dealer_cards)) structure_ok = false;
    for (const auto& seat : rec.seats) {
      bool ok = readable(seat.cards);
      for (const auto& sub : seat.split_hands) ok = ok && readable(sub.cards);
      if (!ok) {
        rec.flags.push_back("unreadable");
        structure_ok = false;
      }
    }

    rec.complete = rec.complete && structure_ok;
    if (rec.complete) settle_hand(rec, dealer_cards, peek_ended);
    records_.push_back(std::move(rec));
  }

  void settle_hand(HandRecord& rec, const std::vector<Rank>& dealer_cards,
                   bool peek_ended) {
    const HandTotal dealer = hand_total(dealer_cards);
    for (auto& seat : rec.seats) {
      if (peek_ended) {
        seat.outcome = is_natural(seat.cards) ? Outcome::Push : Outcome::Loss;
        seat.net = settle(*seat.outcome, seat.bet, false, cfg_.rules);
        continue;
      }
      if (seat.split) {
        seat.net = 0;
        for (auto& sub : seat.split_hands) {
          sub.outcome = adjudicate(hand_total(sub.cards), 3, dealer);
          sub.net = settle(sub.outcome, seat.bet, sub.doubled, cfg_.rules);
          seat.net += sub.net;
        }
      } else {
        seat.outcome = adjudicate(hand_total(seat.cards),
                                  static_cast<int>(seat.cards.size()), dealer);
        seat.net = settle(*seat.outcome, seat.bet, seat.doubled, cfg_.rules);
      }
    }
  }

  AssimilatorConfig cfg_;
  AssimilateStats stats_;
  std::map<std::uint64_t, StreamItem> pending_;
  std::uint64_t max_seen_ = 0;
  std::uint64_t emit_floor_ = 0;
  std::optional<detail::OpenHand> open_;
  std::vector<HandRecord> records_;
};

struct AssimilateResult {
  std::vector<HandRecord> records;
  AssimilateStats stats;
};

inline AssimilateResult assimilate_stream(const std::vector<StreamItem>& items,
                                          const AssimilatorConfig& cfg = {}) {
  Assimilator a(cfg);
  for (const auto& item : items) a.push(item);
  AssimilateResult out;
  out.records = a.finish();
  out.stats = a.stats();
  return out;
}

inline AssimilateResult assimilate_lines(std::istream& in,
                                         const AssimilatorConfig& cfg = {}) {
  Assimilator a(cfg);
  std::string line;
  while (std::getline(in, line)) a.push_line(line);
  AssimilateResult out;
  out.records = a.finish();
  out.stats = a.stats();
  return out;
}

}  // namespace pitboss
