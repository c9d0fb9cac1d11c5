// pitboss: table-intelligence toolchain.
//
//   simulate         Monte-Carlo a policy (or the hold-vs-count curve)
//   derive-strategy  rebuild the strategy chart from per-cell EV estimates
//   synth            play hands and render them as a detection stream
//   assimilate       fuse a detection stream back into hand records
//   ingest           assimilate straight into an append-only store
//   analyze          per-player personas from hand records
//   report           session summary from a store
//
// Exit codes: 0 ok, 1 bad input, 2 internal failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pitboss/analytics.hpp"
#include "pitboss/assimilate.hpp"
#include "pitboss/derive.hpp"
#include "pitboss/simulate.hpp"
#include "pitboss/store.hpp"
#include "pitboss/synth.hpp"

namespace {

using namespace pitboss;

struct GlobalOpts {
  std::uint64_t seed = 1;
  bool seed_set = false;
  int threads = 1;
  std::string config_path;

  RuleConfig rules() const {
    if (config_path.empty()) return RuleConfig{};
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("config: cannot open " + config_path);
    return RuleConfig::from_kv(KeyValueFile::parse(in));
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void emit(const json& summary, const std::string& out_path) {
  const std::string text = summary.dump(2) + "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_text(out_path, text);
}

std::vector<HandRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return read_hand_records(in);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::uint64_t hands = 100000;
  std::string policy = "basic";
  double bet = 25;
  double spread_max = 0;  // > 0 switches to count-driven spread betting
  double hph = 100;
  std::string samples_path;
  std::string summary_path;
  bool theo_report = false;
  bool curve = false;
  std::uint64_t hands_per_bucket = 100000;
  double bucket_min = -2, bucket_max = 6, bucket_step = 1;
  std::string curve_path;
};

int run_simulate(const GlobalOpts& g, const SimulateArgs& a) {
  if (a.curve) {
    CountCurveConfig cfg;
    cfg.rules = g.rules();
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    cfg.hands_per_bucket = a.hands_per_bucket;
    cfg.bucket_min = a.bucket_min;
    cfg.bucket_max = a.bucket_max;
    cfg.bucket_step = a.bucket_step;
    cfg.bet = a.bet;
    const auto buckets = hold_vs_scaled_count(cfg);

    std::string csv = "target,mean_scaled,hands,wagered,net,hold\n";
    for (const auto& b : buckets) {
      char line[160];
      std::snprintf(line, sizeof line, "%.2f,%.6f,%llu,%.2f,%.2f,%.8f\n", b.target,
                    b.mean_scaled, static_cast<unsigned long long>(b.hands), b.wagered,
                    b.net, b.hold());
      csv += line;
    }
    if (!a.curve_path.empty()) write_text(a.curve_path, csv);

    std::vector<std::pair<double, double>> points;
    for (const auto& b : buckets) points.emplace_back(b.mean_scaled, b.hold());
    const HoldModel model = fit_hold_model(points);
    json summary{{"buckets", buckets.size()},
                 {"slope", model.slope},
                 {"intercept", model.intercept},
                 {"r_squared", model.r_squared}};
    if (model.slope < 0) summary["zero_crossing"] = model.zero_crossing();
    emit(summary, a.summary_path);
    return 0;
  }

  if (a.theo_report) {
    SimConfig cfg;
    cfg.rules = g.rules();
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    cfg.hands = a.hands;
    cfg.bet = a.bet;
    cfg.hands_per_hour = a.hph;
    const TheoReport rep = theo_ratio_report(cfg, report_policy_names());
    json rows = json::array();
    for (const auto& row : rep.rows)
      rows.push_back({{"policy", row.policy},
                      {"hands", row.hands},
                      {"hold", row.hold},
                      {"theo_per_hour", row.theo_per_hour},
                      {"ratio", row.ratio}});
    emit(json{{"baseline_theo", rep.baseline_theo},
              {"unstable", rep.unstable},
              {"policies", rows}},
         a.summary_path);
    return 0;
  }

  SimConfig cfg;
  cfg.rules = g.rules();
  cfg.policy_name = a.policy;
  cfg.seed = g.seed;
  cfg.hands = a.hands;
  cfg.bet = a.bet;
  if (a.spread_max > 0) {
    cfg.bet_mode = BetMode::Spread;
    cfg.bet_max = a.spread_max;
  }
  cfg.hands_per_hour = a.hph;
  cfg.threads = g.threads;
  cfg.keep_samples = !a.samples_path.empty();
  const SimResult r = simulate(cfg);

  if (!a.samples_path.empty()) {
    std::string csv = "scaled_before,bet,wagered,net\n";
    for (const auto& s : r.samples) {
      char line[128];
      std::snprintf(line, sizeof line, "%.6f,%.2f,%.2f,%.2f\n", s.scaled_before, s.bet,
                    s.wagered, s.net);
      csv += line;
    }
    write_text(a.samples_path, csv);
  }

  emit(json{{"policy", a.policy},
            {"hands", r.hands},
            {"wagered", r.wagered},
            {"net", r.net},
            {"hold", r.hold()},
            {"theo_per_hour", r.theo_per_hour(a.hph)}},
       a.summary_path);
  return 0;
}

// --------------------------------------------------------- derive-strategy

struct DeriveArgs {
  std::uint64_t hands_per_cell = 20000;
  std::string out_path;
  std::string summary_path;
  double tie_margin = 0.01;
};

int run_derive(const GlobalOpts& g, const DeriveArgs& a) {
  DeriveConfig cfg;
  cfg.rules = g.rules();
  cfg.hands_per_cell = a.hands_per_cell;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  const DerivedStrategy derived = derive_strategy(cfg);
  write_text(a.out_path, derived.table.to_csv());

  const AgreementReport agreement =
      table_agreement(derived, canonical_basic_table(), a.tie_margin);
  emit(json{{"provenance", derived.table.provenance()},
            {"compared", agreement.compared},
            {"agreed", agreement.agreed},
            {"near_ties", agreement.near_ties},
            {"agreement", agreement.fraction()}},
       a.summary_path);
  return 0;
}

// -------------------------------------------------------------------- synth

struct SynthArgs {
  int hands = 10;
  std::string policy = "basic";
  int seat = 1;
  std::string player_id;
  double bet = 25;
  double spread_max = 0;
  int fps = 10;
  std::string session = "s1";
  std::string noise_path;
  std::string out_path;
  std::string truth_path;
  std::string summary_path;
};

int run_synth(const GlobalOpts& g, const SynthArgs& a) {
  SynthConfig cfg;
  cfg.rules = g.rules();
  PlayerSpec player;
  player.seat = a.seat;
  player.player_id = a.player_id;
  player.policy = a.policy;
  player.bet = a.bet;
  if (a.spread_max > 0) {
    player.bet_mode = BetMode::Spread;
    player.bet_max = a.spread_max;
  }
  cfg.players = {player};
  cfg.hands = a.hands;
  cfg.fps = a.fps;
  cfg.seed = g.seed;
  cfg.session_id = a.session;
  if (!a.noise_path.empty())
    cfg.noise = noise_from_kv(KeyValueFile::parse_string(slurp(a.noise_path)));

  const SynthResult result = synth_session(cfg);

  std::string stream_text;
  for (const auto& item : result.stream) stream_text += stream_line(item) + "\n";
  write_text(a.out_path, stream_text);

  if (!a.truth_path.empty()) {
    std::ostringstream truth;
    write_hand_records(truth, result.truth);
    write_text(a.truth_path, truth.str());
  }

  emit(json{{"hands", result.truth.size()},
            {"lines", result.stream.size()}},
       a.summary_path);
  return 0;
}

// --------------------------------------------------------------- assimilate

struct AssimilateArgs {
  std::string stream_path;
  std::string out_path;
  std::string store_path;
  std::string summary_path;
  int max_lag = 20;
  int stability = 3;
  bool require_store = false;  // ingest spelling
};

int run_assimilate(const GlobalOpts& g, const AssimilateArgs& a) {
  AssimilatorConfig cfg;
  cfg.rules = g.rules();
  cfg.max_lag = a.max_lag;
  cfg.stability_frames = a.stability;

  Assimilator assim(cfg);
  auto feed = [&](std::istream& in) {
    std::string line;
    while (std::getline(in, line)) assim.push_line(line);
  };
  if (a.stream_path == "-") {
    feed(std::cin);
  } else {
    std::ifstream in(a.stream_path);
    if (!in) throw std::invalid_argument("cannot open " + a.stream_path);
    feed(in);
  }
  const std::vector<HandRecord> records = assim.finish();
  const AssimilateStats& stats = assim.stats();

  json summary{{"hands", records.size()},
               {"lines", stats.lines},
               {"frames", stats.frames},
               {"malformed", stats.malformed},
               {"late_dropped", stats.late_dropped},
               {"duplicates", stats.duplicates},
               {"orphan_frames", stats.orphan_frames}};
  for (const auto& d : stats.diagnostics) std::cerr << "pitboss: " << d << "\n";

  if (!a.store_path.empty()) {
    HandStore store(a.store_path);
    const IngestSummary ingest = store.append_all(records);
    summary["appended"] = ingest.appended;
    summary["duplicates_in_store"] = ingest.duplicates;
    summary["store_size"] = store.size();
  }
  if (!a.out_path.empty()) {
    std::ostringstream text;
    write_hand_records(text, records);
    write_text(a.out_path, text.str());
  }
  if (a.store_path.empty() && a.out_path.empty() && a.summary_path.empty()) {
    // bare assimilate behaves like a filter: records out, stats to stderr
    write_hand_records(std::cout, records);
    std::cerr << summary.dump() << "\n";
    return 0;
  }
  emit(summary, a.summary_path);
  return 0;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string hands_path;
  std::string strategy_path;
  std::string out_path;
  std::string plots_path;
  double hph = 100;
  std::uint64_t sim_hands = 200000;
};

int run_analyze(const GlobalOpts& g, const AnalyzeArgs& a) {
  const std::vector<HandRecord> records = load_records(a.hands_path);

  AnalyticsOptions opts;
  opts.rules = g.rules();
  opts.hands_per_hour = a.hph;
  opts.multiplier_hands = a.sim_hands;
  if (g.seed_set) opts.seed = g.seed;

  TableAnalysis analysis;
  if (a.strategy_path.empty()) {
    analysis = analyze_records(records, opts);
  } else {
    const StrategyTable chart = StrategyTable::from_csv(slurp(a.strategy_path));
    analysis = analyze_records(records, chart, opts);
  }

  json players = json::array();
  for (const auto& p : analysis.players) players.push_back(to_json(p));
  emit(json{{"records_used", analysis.records_used},
            {"records_skipped", analysis.records_skipped},
            {"players", players}},
       a.out_path);

  if (!a.plots_path.empty()) {
    std::string csv = "player_id,hand,h_player,h_flatbet\n";
    for (const auto& p : analysis.players) {
      std::vector<std::pair<double, double>> bets_and_holds;
      for (const auto& s : p.samples)
        bets_and_holds.emplace_back(s.bet, s.bet > 0 ? -s.net / s.bet : 0.0);
      const auto curve = cumulative_series(bets_and_holds);
      for (std::size_t i = 0; i < curve.size(); ++i) {
        char line[160];
        std::snprintf(line, sizeof line, "%s,%zu,%.10f,%.10f\n", p.player_id.c_str(),
                      i + 1, curve[i].h_player, curve[i].h_flatbet);
        csv += line;
      }
    }
    write_text(a.plots_path, csv);
  }
  return 0;
}

// ------------------------------------------------------------------- report

struct ReportArgs {
  std::string store_path;
  std::string session;
  bool as_json = false;
  std::string out_path;
  std::uint64_t sim_hands = 200000;
};

int run_report(const GlobalOpts& g, const ReportArgs& a) {
  HandStore store(a.store_path);
  AnalyticsOptions opts;
  opts.rules = g.rules();
  opts.multiplier_hands = a.sim_hands;
  if (g.seed_set) opts.seed = g.seed;
  const SessionReport rep =
      build_session_report(store.session(a.session), a.session, opts);
  const std::string text =
      a.as_json ? to_json(rep).dump(2) + "\n" : report_text(rep);
  if (a.out_path.empty())
    std::cout << text;
  else
    write_text(a.out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitboss: blackjack table intelligence toolchain"};
  app.require_subcommand(1);
  app.fallthrough();

  auto g = std::make_shared<GlobalOpts>();
  app.add_option("--seed", g->seed, "base RNG seed")->each([g](const std::string&) {
    g->seed_set = true;
  });
  app.add_option("--threads", g->threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g->config_path, "house rules key=value file");

  auto sim = std::make_shared<SimulateArgs>();
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo a playing policy");
  sim_cmd->add_option("--hands", sim->hands, "hands to deal");
  sim_cmd->add_option("--policy", sim->policy, "policy name");
  sim_cmd->add_option("--bet", sim->bet, "flat bet (spread minimum)");
  sim_cmd->add_option("--spread", sim->spread_max, "bet cap; spread by count");
  sim_cmd->add_option("--hph", sim->hph, "hands per hour for theo");
  sim_cmd->add_option("--samples", sim->samples_path, "per-hand samples CSV");
  sim_cmd->add_option("--out", sim->summary_path, "summary JSON path (default stdout)");
  sim_cmd->add_flag("--theo-report", sim->theo_report,
                    "compare shipped policies against basic");
  sim_cmd->add_flag("--curve", sim->curve, "hold vs scaled count instead");
  sim_cmd->add_option("--hands-per-bucket", sim->hands_per_bucket, "curve sample size");
  sim_cmd->add_option("--bucket-min", sim->bucket_min, "lowest count bucket");
  sim_cmd->add_option("--bucket-max", sim->bucket_max, "highest count bucket");
  sim_cmd->add_option("--bucket-step", sim->bucket_step, "bucket spacing");
  sim_cmd->add_option("--curve-out", sim->curve_path, "bucket CSV path");

  auto der = std::make_shared<DeriveArgs>();
  auto* der_cmd = app.add_subcommand("derive-strategy", "derive the chart from EV");
  der_cmd->add_option("--hands-per-cell", der->hands_per_cell,
                      "trials per action per cell");
  der_cmd->add_option("--out", der->out_path, "strategy CSV path")->required();
  der_cmd->add_option("--summary", der->summary_path, "summary JSON path");
  der_cmd->add_option("--tie-margin", der->tie_margin, "EV margin treated as a toss-up");

  auto syn = std::make_shared<SynthArgs>();
  auto* syn_cmd = app.add_subcommand("synth", "render hands as a detection stream");
  syn_cmd->add_option("--hands", syn->hands, "hands to play");
  syn_cmd->add_option("--policy", syn->policy, "player policy");
  syn_cmd->add_option("--seat", syn->seat, "seat number 1-7");
  syn_cmd->add_option("--player-id", syn->player_id, "player label in truth records");
  syn_cmd->add_option("--bet", syn->bet, "flat bet (spread minimum)");
  syn_cmd->add_option("--spread", syn->spread_max, "bet cap; spread by count");
  syn_cmd->add_option("--fps", syn->fps, "frames per second");
  syn_cmd->add_option("--session", syn->session, "session id prefix");
  syn_cmd->add_option("--noise", syn->noise_path, "noise profile key=value file");
  syn_cmd->add_option("--out", syn->out_path, "stream JSONL path")->required();
  syn_cmd->add_option("--truth", syn->truth_path, "ground-truth records JSONL");
  syn_cmd->add_option("--summary", syn->summary_path, "summary JSON path");

  auto asm_args = std::make_shared<AssimilateArgs>();
  auto* asm_cmd = app.add_subcommand("assimilate", "rebuild hand records from a stream");
  asm_cmd->add_option("--stream", asm_args->stream_path, "stream JSONL, '-' for stdin")
      ->required();
  asm_cmd->add_option("--out", asm_args->out_path, "records JSONL path");
  asm_cmd->add_option("--store", asm_args->store_path, "persist into this store dir");
  asm_cmd->add_option("--summary", asm_args->summary_path, "summary JSON path");
  asm_cmd->add_option("--max-lag", asm_args->max_lag, "reorder horizon in indexes");
  asm_cmd->add_option("--stability", asm_args->stability,
                      "frames before a layout change commits");

  auto ing_args = std::make_shared<AssimilateArgs>();
  auto* ing_cmd = app.add_subcommand("ingest", "assimilate into an append-only store");
  ing_cmd->add_option("--stream", ing_args->stream_path, "stream JSONL, '-' for stdin")
      ->required();
  ing_cmd->add_option("--store", ing_args->store_path, "store directory")->required();
  ing_cmd->add_option("--out", ing_args->out_path, "records JSONL path");
  ing_cmd->add_option("--summary", ing_args->summary_path, "summary JSON path");
  ing_cmd->add_option("--max-lag", ing_args->max_lag, "reorder horizon in indexes");

  auto ana = std::make_shared<AnalyzeArgs>();
  auto* ana_cmd = app.add_subcommand("analyze", "per-player personas from records");
  ana_cmd->add_option("--hands", ana->hands_path, "hand records JSONL")->required();
  ana_cmd->add_option("--strategy", ana->strategy_path, "chart CSV to score against");
  ana_cmd->add_option("--out", ana->out_path, "personas JSON path (default stdout)");
  ana_cmd->add_option("--plots", ana->plots_path, "cumulative holds CSV path");
  ana_cmd->add_option("--hph", ana->hph, "hands per hour for theo");
  ana_cmd->add_option("--sim-hands", ana->sim_hands,
                      "hands for the skill multiplier simulation");

  auto rep = std::make_shared<ReportArgs>();
  auto* rep_cmd = app.add_subcommand("report", "session summary from a store");
  rep_cmd->add_option("--store", rep->store_path, "store directory")->required();
  rep_cmd->add_option("--session", rep->session, "session id")->required();
  rep_cmd->add_flag("--json", rep->as_json, "emit JSON instead of text");
  rep_cmd->add_option("--out", rep->out_path, "write here instead of stdout");
  rep_cmd->add_option("--sim-hands", rep->sim_hands,
                      "hands for the skill multiplier simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(*g, *sim);
    if (der_cmd->parsed()) return run_derive(*g, *der);
    if (syn_cmd->parsed()) return run_synth(*g, *syn);
    if (asm_cmd->parsed()) return run_assimilate(*g, *asm_args);
    if (ing_cmd->parsed()) return run_assimilate(*g, *ing_args);
    if (ana_cmd->parsed()) return run_analyze(*g, *ana);
    if (rep_cmd->parsed()) return run_report(*g, *rep);
  } catch (const std::invalid_argument& e) {
    std::cerr << "pitboss: error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "pitboss: error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "pitboss: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pitboss: internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
