#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "pitboss/analytics.hpp"
#include "pitboss/hand_record.hpp"

namespace pitboss {

/// Append-only hand archive. One JSON record per line plus an in-memory
/// fingerprint set, so re-ingesting the same stream is a no-op.

struct IngestSummary {
  int appended = 0;
  int duplicates = 0;
};

class HandStore {
 public:
  explicit HandStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    std::ifstream in(file_path());
    if (in) {
      records_ = read_hand_records(in);
      for (const auto& r : records_) seen_.insert(record_fingerprint(r));
    }
  }

  std::filesystem::path file_path() const { return dir_ / "hands.jsonl"; }

  bool append(const HandRecord& r) {
    if (!seen_.insert(record_fingerprint(r)).second) return false;
    std::ofstream out(file_path(), std::ios::app);
    if (!out) throw std::runtime_error("store: cannot write " + file_path().string());
    out << to_json(r).dump() << '\n';
    records_.push_back(r);
    return true;
  }

  IngestSummary append_all(const std::vector<HandRecord>& recs) {
    IngestSummary s;
    for (const auto& r : recs) (append(r) ? s.appended : s.duplicates) += 1;
    return s;
  }

  const std::vector<HandRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  /// Hands belonging to one session, by the "<session>:<hand>" id convention.
  std::vector<HandRecord> session(const std::string& session_id) const {
    const std::string prefix = session_id + ":";
    std::vector<HandRecord> out;
    for (const auto& r : records_)
      if (r.hand_id.rfind(prefix, 0) == 0) out.push_back(r);
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::unordered_set<std::uint64_t> seen_;
  std::vector<HandRecord> records_;
};

struct PlayerReportRow {
  std::string player_id;
  int hands = 0;  // seat-hands, split hands still count once
  double avg_bet = 0;
  double wagered = 0;
  double net = 0;  // player's view: positive means the player won money
  int wins = 0;
  int losses = 0;
  int pushes = 0;
  int blackjacks = 0;
  double skill_score = 0;
  std::string skill_label = "unknown";
  double skill_theo_multiplier = 1;
  bool counting_flagged = false;
  double counting_advantage = 0;
  double est_theo_per_hour = 0;
};

struct SessionReport {
  std::string session_id;
  int hands = 0;  // table hands analyzed
  int incomplete = 0;
  double wagered = 0;
  double net = 0;
  double hold = 0;  // house hold on total wagered
  std::vector<PlayerReportRow> players;
};

namespace detail {

inline void count_outcome(PlayerReportRow& row, Outcome outcome) {
  switch (outcome) {
    case Outcome::Won: row.wins += 1; break;
    case Outcome::Blackjack:
      row.wins += 1;
      row.blackjacks += 1;
      break;
    case Outcome::Loss:
    case Outcome::Bust: row.losses += 1; break;
    case Outcome::Push: row.pushes += 1; break;
  }
}

}  // namespace detail

/// Rolls one session's stored hands into per-player rows. Skill and
/// counting columns come from the same analysis the analyze command runs.
inline SessionReport build_session_report(const std::vector<HandRecord>& records,
                                          const std::string& session_id,
                                          const AnalyticsOptions& opts = {}) {
  SessionReport rep;
  rep.session_id = session_id;

  const TableAnalysis analysis = analyze_records(records, opts);
  rep.hands = analysis.records_used;
  rep.incomplete = analysis.records_skipped;

  std::map<std::string, PlayerReportRow> rows;
  for (const auto& rec : records) {
    if (!rec.complete) continue;
    for (const auto& seat : rec.seats) {
      if (seat.bet <= 0) continue;
      const std::string id =
          seat.player_id.empty() ? "p" + std::to_string(seat.seat) : seat.player_id;
      PlayerReportRow& row = rows[id];
      row.player_id = id;
      row.hands += 1;
      row.net += seat.net;
      if (seat.split) {
        for (const auto& sub : seat.split_hands) {
          row.wagered += seat.bet * (sub.doubled ? 2 : 1);
          detail::count_outcome(row, sub.outcome);
        }
      } else {
        row.wagered += seat.bet * (seat.doubled ? 2 : 1);
        if (seat.outcome) detail::count_outcome(row, *seat.outcome);
      }
    }
  }

  for (const auto& persona : analysis.players) {
    auto it = rows.find(persona.player_id);
    if (it == rows.end()) continue;
    PlayerReportRow& row = it->second;
    row.avg_bet = persona.avg_bet;
    row.skill_score = persona.skill.score();
    row.skill_label = persona.skill.label();
    row.skill_theo_multiplier = persona.theo_multiplier;
    row.counting_flagged = persona.counting.flagged;
    row.counting_advantage = persona.counting.advantage;
    row.est_theo_per_hour = persona.est_theo_per_hour;
  }

  for (auto& [id, row] : rows) {
    if (row.hands > 0 && row.avg_bet == 0) row.avg_bet = row.wagered / row.hands;
    rep.wagered += row.wagered;
    rep.net += row.net;
    rep.players.push_back(row);
  }
  rep.hold = rep.wagered > 0 ? -rep.net / rep.wagered : 0;
  return rep;
}

inline json to_json(const SessionReport& rep) {
  json players = json::array();
  for (const auto& row : rep.players) {
    players.push_back({{"player_id", row.player_id},
                       {"hands", row.hands},
                       {"average_bet", row.avg_bet},
                       {"wagered", row.wagered},
                       {"net", row.net},
                       {"wins", row.wins},
                       {"losses", row.losses},
                       {"pushes", row.pushes},
                       {"blackjacks", row.blackjacks},
                       {"skill_score", row.skill_score},
                       {"skill_label", row.skill_label},
                       {"skill_theo_multiplier", row.skill_theo_multiplier},
                       {"counting_flagged", row.counting_flagged},
                       {"counting_advantage", row.counting_advantage},
                       {"est_theo_per_hour", row.est_theo_per_hour}});
  }
  return json{{"session_id", rep.session_id}, {"hands", rep.hands},
              {"incomplete", rep.incomplete}, {"wagered", rep.wagered},
              {"net", rep.net},               {"hold", rep.hold},
              {"players", players}};
}

namespace detail {

inline std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

}  // namespace detail

/// Plain-text session summary. Formatting is fixed so regenerating the
/// report for unchanged data gives byte-identical output.
inline std::string report_text(const SessionReport& rep) {
  std::string out;
  out += "session " + rep.session_id + ": " + std::to_string(rep.hands) + " hands";
  if (rep.incomplete > 0)
    out += " (" + std::to_string(rep.incomplete) + " incomplete skipped)";
  out += ", " + std::to_string(rep.players.size()) + " players\n";
  out += "table: wagered " + detail::fixed(rep.wagered, 2) + ", net " +
         detail::fixed(rep.net, 2) + ", hold " + detail::fixed(rep.hold * 100, 3) +
         "%\n";
  for (const auto& row : rep.players) {
    out += "player " + row.player_id + ": hands " + std::to_string(row.hands) +
           ", avg bet " + detail::fixed(row.avg_bet, 2) + ", net " +
           detail::fixed(row.net, 2) + ", W/L/P " + std::to_string(row.wins) + "/" +
           std::to_string(row.losses) + "/" + std::to_string(row.pushes) + ", bj " +
           std::to_string(row.blackjacks) + "\n";
    out += "  skill " + row.skill_label + " (" + detail::fixed(row.skill_score, 3) +
           "), theo x" + detail::fixed(row.skill_theo_multiplier, 2) +
           ", est theo/hr " + detail::fixed(row.est_theo_per_hour, 2) + "\n";
    out += std::string("  counting ") + (row.counting_flagged ? "FLAGGED" : "clear") +
           ", advantage " + detail::fixed(row.counting_advantage * 100, 3) + "%\n";
  }
  return out;
}

}  // namespace pitboss
