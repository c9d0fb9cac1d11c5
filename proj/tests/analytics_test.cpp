#include "pitboss/analytics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pitboss/play.hpp"

namespace pitboss {
namespace {

std::vector<HandRecord> play_records(int hands, const std::string& policy_name,
                                     std::uint64_t seed, double bet,
                                     const std::string& player_id) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  Policy policy = make_policy(policy_name, chart);
  Rng rng(derive_seed(seed, 0));
  Shoe shoe(rules.deck_count, derive_seed(seed, 1), rules.penetration);
  std::vector<HandRecord> out;
  out.reserve(hands);
  for (int i = 0; i < hands; ++i) {
    bool shuffled = i == 0;
    if (shoe.needs_shuffle()) {
      shoe.shuffle();
      shuffled = true;
    }
    SeatPlan plan{1, bet, false, player_id};
    out.push_back(play_hand(shoe, rules, policy, {plan}, rng,
                            "h" + std::to_string(i), shuffled));
  }
  return out;
}

TEST(HoldModelFit, RecoversExactLine) {
  std::vector<std::pair<double, double>> pts;
  for (int x = -2; x <= 6; ++x)
    pts.push_back({double(x), expected_hold(kReferenceHoldModel, x)});
  HoldModel m = fit_hold_model(pts);
  EXPECT_NEAR(m.slope, kReferenceHoldModel.slope, 1e-12);
  EXPECT_NEAR(m.intercept, kReferenceHoldModel.intercept, 1e-12);
  EXPECT_NEAR(m.r_squared, 1.0, 1e-12);
}

TEST(HoldModelFit, NoisyDataStillCloseWithLowerRSquared) {
  std::vector<std::pair<double, double>> pts;
  double wiggle = 1e-4;
  for (int x = -2; x <= 6; ++x) {
    pts.push_back({double(x), expected_hold(kReferenceHoldModel, x) + wiggle});
    wiggle = -wiggle;
  }
  HoldModel m = fit_hold_model(pts);
  EXPECT_NEAR(m.slope, kReferenceHoldModel.slope, 2e-4);
  EXPECT_LT(m.r_squared, 1.0);
  EXPECT_GT(m.r_squared, 0.9);
}

TEST(HoldModelFit, ConstantDataIsAnExactFlatFit) {
  HoldModel m = fit_hold_model({{0, 0.004}, {1, 0.004}, {2, 0.004}});
  EXPECT_EQ(m.slope, 0.0);
  EXPECT_DOUBLE_EQ(m.intercept, 0.004);
  EXPECT_EQ(m.r_squared, 1.0);
  EXPECT_THROW(m.zero_crossing(), std::domain_error);
}

TEST(HoldModelFit, RejectsDegenerateInputs) {
  EXPECT_THROW(fit_hold_model({}), std::domain_error);
  EXPECT_THROW(fit_hold_model({{1.0, 0.005}}), std::domain_error);
  EXPECT_THROW(fit_hold_model({{1.0, 0.005}, {1.0, 0.004}}), std::domain_error);
}

TEST(ReferenceModel, MatchesPublishedNumbers) {
  EXPECT_DOUBLE_EQ(kReferenceHoldModel.slope, -0.00474);
  EXPECT_DOUBLE_EQ(kReferenceHoldModel.intercept, 0.00512);
  EXPECT_DOUBLE_EQ(kReferenceHoldModel.r_squared, 0.98326);
  EXPECT_DOUBLE_EQ(expected_hold(kReferenceHoldModel, 0), 0.00512);
  EXPECT_NEAR(expected_hold(kReferenceHoldModel, 2), -0.00436, 1e-12);
  EXPECT_NEAR(expected_hold(kReferenceHoldModel, 1.08), 0.0, 2e-5);
  EXPECT_NEAR(kReferenceHoldModel.zero_crossing(), 1.08, 0.001);
}

TEST(ReferenceModel, HoldIsAffine) {
  const double xs[] = {-2.0, -0.5, 0.0, 0.7, 1.08, 3.0, 6.0};
  for (double x1 : xs)
    for (double x2 : xs) {
      const double lhs = expected_hold(kReferenceHoldModel, x1) +
                         expected_hold(kReferenceHoldModel, x2);
      const double rhs = 2 * expected_hold(kReferenceHoldModel, (x1 + x2) / 2);
      EXPECT_NEAR(lhs, rhs, 1e-15);
    }
}

TEST(Pearson, KnownCorrelations) {
  std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> up{2, 4, 6, 8, 10};
  std::vector<double> down{10, 8, 6, 4, 2};
  EXPECT_NEAR(*pearson(x, up), 1.0, 1e-12);
  EXPECT_NEAR(*pearson(x, down), -1.0, 1e-12);
  std::vector<double> bent{1, 4, 9, 16, 25};
  auto r = pearson(x, bent);
  ASSERT_TRUE(r.has_value());
  EXPECT_GT(*r, 0.9);
  EXPECT_LT(*r, 1.0);
}

TEST(Pearson, DegenerateInputs) {
  std::vector<double> x{1, 2, 3};
  std::vector<double> flat{7, 7, 7};
  EXPECT_FALSE(pearson(x, flat).has_value());
  EXPECT_FALSE(pearson(flat, x).has_value());
  EXPECT_FALSE(pearson({1.0}, {2.0}).has_value());
  EXPECT_THROW(pearson({1, 2}, {1, 2, 3}), std::domain_error);
}

TEST(CumulativeHolds, WorkedExampleToTenDigits) {
  CumulativeHolds h = cumulative_holds({{50.0, 0.005}, {150.0, -0.004}});
  EXPECT_DOUBLE_EQ(h.h_player, -0.00175);
  EXPECT_DOUBLE_EQ(h.h_flatbet, 0.0005);
  EXPECT_NEAR(h.h_player, -0.00175, 1e-13);
  EXPECT_NEAR(h.h_flatbet, 0.0005, 1e-13);
}

TEST(CumulativeHolds, ConstantBetsAreExactlyEqual) {
  std::vector<std::pair<double, double>> hands;
  double h = 0.356789;
  for (int i = 0; i < 37; ++i) {
    hands.push_back({25.0, h});
    h = h * -0.77 + 1.0 / 3.0;  // awkward, non-representable holds
  }
  CumulativeHolds c = cumulative_holds(hands);
  EXPECT_EQ(c.h_player, c.h_flatbet);
}

TEST(CumulativeHolds, BigBetsOnNegativeHoldsDragPlayerHoldDown) {
  CumulativeHolds c = cumulative_holds(
      {{25, 0.01}, {25, 0.008}, {200, -0.004}, {25, 0.01}, {200, -0.002}});
  EXPECT_LT(c.h_player, c.h_flatbet);
}

TEST(CumulativeHolds, RejectsBadInput) {
  EXPECT_THROW(cumulative_holds({}), std::domain_error);
  EXPECT_THROW(cumulative_holds({{0.0, 0.01}}), std::domain_error);
  EXPECT_THROW(cumulative_holds({{25.0, 0.01}, {-5.0, 0.0}}), std::domain_error);
}

TEST(CumulativeSeries, PrefixesMatchDirectRecomputation) {
  std::vector<std::pair<double, double>> hands{
      {50, 0.005}, {150, -0.004}, {25, 0.01}, {25, -0.02}, {300, 0.001}};
  auto series = cumulative_series(hands);
  ASSERT_EQ(series.size(), hands.size());
  for (std::size_t i = 0; i < hands.size(); ++i) {
    std::vector<std::pair<double, double>> prefix(hands.begin(),
                                                  hands.begin() + i + 1);
    CumulativeHolds direct = cumulative_holds(prefix);
    EXPECT_DOUBLE_EQ(series[i].h_player, direct.h_player) << "prefix " << i;
    EXPECT_DOUBLE_EQ(series[i].h_flatbet, direct.h_flatbet) << "prefix " << i;
  }
}

TEST(CumulativeSeries, ConstantBetPrefixesStayIdentical) {
  std::vector<std::pair<double, double>> hands;
  for (int i = 0; i < 20; ++i) hands.push_back({10.0, 0.1 * ((i % 5) - 2)});
  for (const auto& h : cumulative_series(hands)) {
    EXPECT_EQ(h.h_player, h.h_flatbet);
  }
}

std::vector<double> ramp_scaled() {
  std::vector<double> s;
  for (int rep = 0; rep < 4; ++rep)
    for (int v = -2; v <= 2; ++v) s.push_back(double(v));
  return s;
}

TEST(Counting, FlagsRampBettorWithRealEdge) {
  std::vector<double> scaled = ramp_scaled();
  std::vector<std::pair<double, double>> hands;
  for (double s : scaled) {
    const double bet = s >= 1 ? 25.0 * 4 * s : 25.0;
    hands.push_back({bet, expected_hold(kReferenceHoldModel, s)});
  }
  CountingAssessment a = assess_counting(scaled, hands);
  ASSERT_TRUE(a.correlation.has_value());
  EXPECT_GE(*a.correlation, 0.5);
  EXPECT_GE(a.advantage, 0.001);
  EXPECT_TRUE(a.flagged);
}

TEST(Counting, FlatBettorHasExactlyZeroAdvantage) {
  std::vector<double> scaled = ramp_scaled();
  std::vector<std::pair<double, double>> hands;
  for (double s : scaled)
    hands.push_back({50.0, expected_hold(kReferenceHoldModel, s) + 0.123 * s});
  CountingAssessment a = assess_counting(scaled, hands);
  EXPECT_FALSE(a.correlation.has_value());
  EXPECT_EQ(a.advantage, 0.0);
  EXPECT_FALSE(a.flagged);
}

TEST(Counting, AntiCorrelatedBettorIsNotFlagged) {
  std::vector<double> scaled = ramp_scaled();
  std::vector<std::pair<double, double>> hands;
  for (double s : scaled) {
    const double bet = s <= -1 ? 200.0 : 25.0;
    hands.push_back({bet, expected_hold(kReferenceHoldModel, s)});
  }
  CountingAssessment a = assess_counting(scaled, hands);
  ASSERT_TRUE(a.correlation.has_value());
  EXPECT_LT(*a.correlation, 0.0);
  EXPECT_LT(a.advantage, 0.0);
  EXPECT_FALSE(a.flagged);
}

TEST(Counting, ScalingBetsChangesNothing) {
  std::vector<double> scaled = ramp_scaled();
  std::vector<std::pair<double, double>> hands, scaled_up;
  for (double s : scaled) {
    const double bet = s >= 1 ? 100.0 * s : 25.0;
    const double hold = expected_hold(kReferenceHoldModel, s);
    hands.push_back({bet, hold});
    scaled_up.push_back({bet * 7, hold});
  }
  CountingAssessment a = assess_counting(scaled, hands);
  CountingAssessment b = assess_counting(scaled, scaled_up);
  ASSERT_TRUE(a.correlation.has_value());
  ASSERT_TRUE(b.correlation.has_value());
  EXPECT_NEAR(*a.correlation, *b.correlation, 1e-12);
  EXPECT_NEAR(a.advantage, b.advantage, 1e-12);
  EXPECT_EQ(a.flagged, b.flagged);
}

TEST(Counting, RequiresTenHands) {
  std::vector<double> scaled(9, 0.0);
  std::vector<std::pair<double, double>> hands(9, {25.0, 0.005});
  EXPECT_THROW(assess_counting(scaled, hands), std::domain_error);
  EXPECT_THROW(assess_counting({1.0}, {{25.0, 0.1}, {25.0, 0.1}}),
               std::domain_error);
}

SeatRecord plain_seat(std::vector<Rank> cards, std::vector<Action> decisions) {
  SeatRecord s;
  s.seat = 1;
  s.bet = 25;
  s.cards = std::move(cards);
  s.decisions = std::move(decisions);
  s.net = 0;
  return s;
}

TEST(SkillScoring, OpeningDecisionScoredAgainstChart) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  SkillReport r;
  score_seat(r, chart, plain_seat({10, 6, 2}, {Action::Hit, Action::Stand}), 10,
             rules);
  EXPECT_EQ(r.scored, 1);
  EXPECT_EQ(r.matched, 1);

  score_seat(r, chart, plain_seat({10, 6}, {Action::Stand}), 10, rules);
  EXPECT_EQ(r.scored, 2);
  EXPECT_EQ(r.matched, 1);
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_EQ(r.deviations[0].cell, "H16 vs 10");
  EXPECT_EQ(r.deviations[0].took, Action::Stand);
  EXPECT_EQ(r.deviations[0].ideal, Action::Hit);

  score_seat(r, chart, plain_seat({10, 6}, {Action::Stand}), 10, rules);
  EXPECT_EQ(r.deviations[0].count, 2);
}

TEST(SkillScoring, LaterDecisionsRecordedButUnscored) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  SkillReport r;
  score_seat(r, chart,
             plain_seat({2, 3, 6, 10}, {Action::Hit, Action::Hit, Action::Stand}),
             10, rules);
  EXPECT_EQ(r.scored, 1);
  EXPECT_EQ(r.matched, 1);
  const int h5 = Policy::cell_key({HandClass::Kind::Hard, 5}, 10);
  const int h11 = Policy::cell_key({HandClass::Kind::Hard, 11}, 10);
  EXPECT_EQ(r.observed.at(h5).at(Action::Hit), 1);
  EXPECT_EQ(r.observed.at(h11).at(Action::Hit), 1);
}

TEST(SkillScoring, SplitIsTheOpeningDecision) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  SkillReport r;
  SeatRecord good = plain_seat({8, 8}, {});
  good.split = true;
  good.split_hands.push_back({{8, 10}, {Action::Stand}, false, Outcome::Won, 25});
  good.split_hands.push_back(
      {{8, 3, 10}, {Action::Hit, Action::Stand}, false, Outcome::Won, 25});
  score_seat(r, chart, good, 6, rules);
  EXPECT_EQ(r.scored, 1);
  EXPECT_EQ(r.matched, 1);

  SeatRecord bad = plain_seat({10, 10}, {});
  bad.split = true;
  bad.split_hands.push_back({{10, 5}, {Action::Stand}, false, Outcome::Loss, -25});
  bad.split_hands.push_back({{10, 9}, {Action::Stand}, false, Outcome::Won, 25});
  score_seat(r, chart, bad, 6, rules);
  EXPECT_EQ(r.scored, 2);
  EXPECT_EQ(r.matched, 1);
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_EQ(r.deviations[0].cell, "P10 vs 6");
  EXPECT_EQ(r.deviations[0].ideal, Action::Stand);
}

TEST(SkillScoring, UnknownCardsExcludedSeparately) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  SkillReport r;
  score_seat(r, chart, plain_seat({0, 10}, {Action::Stand}), 10, rules);
  score_seat(r, chart, plain_seat({10, 6}, {Action::Hit, Action::Stand}), 0, rules);
  EXPECT_EQ(r.excluded_unknown, 2);
  EXPECT_EQ(r.scored, 0);
  EXPECT_EQ(r.label(), "unknown");
}

TEST(SkillScoring, NaturalsAndPeekLossesScoreNothing) {
  RuleConfig rules;
  const StrategyTable& chart = canonical_basic_table();
  SkillReport r;
  score_seat(r, chart, plain_seat({1, 10}, {}), 10, rules);
  score_seat(r, chart, plain_seat({5, 9}, {}), 1, rules);
  EXPECT_EQ(r.scored, 0);
  EXPECT_EQ(r.seats_skipped, 0);
  EXPECT_EQ(r.excluded_unknown, 0);
}

TEST(SkillScoring, LabelsFollowThresholds) {
  auto label_for = [](int matched, int scored) {
    SkillReport r;
    r.matched = matched;
    r.scored = scored;
    return r.label();
  };
  EXPECT_EQ(label_for(20, 20), "expert");
  EXPECT_EQ(label_for(19, 20), "expert");
  EXPECT_EQ(label_for(18, 20), "skilled");
  EXPECT_EQ(label_for(17, 20), "skilled");
  EXPECT_EQ(label_for(14, 20), "average");
  EXPECT_EQ(label_for(13, 20), "novice");
  EXPECT_EQ(label_for(0, 0), "unknown");
}

TEST(SkillEvaluate, EnginePlayerScoresPerfect) {
  auto records = play_records(400, "basic", 31, 25, "alice");
  RuleConfig rules;
  SkillEvaluation e = skill_evaluate(records, canonical_basic_table(), rules, 0);
  EXPECT_GT(e.report.scored, 100);
  EXPECT_EQ(e.report.matched, e.report.scored);
  EXPECT_EQ(e.report.excluded_unknown, 0);
  EXPECT_EQ(e.report.seats_skipped, 0);
  EXPECT_DOUBLE_EQ(e.report.score(), 1.0);
  EXPECT_EQ(e.report.label(), "expert");
  EXPECT_DOUBLE_EQ(e.theo_multiplier, 1.0);
}

TEST(SkillEvaluate, AlwaysStandCostsMoreThanTheBook) {
  auto records = play_records(400, "always-stand", 32, 25, "bob");
  RuleConfig rules;
  SkillEvaluation e =
      skill_evaluate(records, canonical_basic_table(), rules, 60000, 11);
  EXPECT_LT(e.report.score(), 0.7);
  EXPECT_GT(e.theo_multiplier, 2.0);
}

TEST(SkillEvaluate, ScoreUnchangedByRecordOrder) {
  auto records = play_records(120, "mimic-dealer", 33, 25, "carol");
  RuleConfig rules;
  SkillEvaluation forward =
      skill_evaluate(records, canonical_basic_table(), rules, 0);
  std::reverse(records.begin(), records.end());
  SkillEvaluation backward =
      skill_evaluate(records, canonical_basic_table(), rules, 0);
  EXPECT_EQ(forward.report.scored, backward.report.scored);
  EXPECT_EQ(forward.report.matched, backward.report.matched);
}

TEST(AnalyzeRecords, FlatEnginePlayerComesOutClean) {
  auto records = play_records(500, "basic", 34, 25, "alice");
  AnalyticsOptions opts;
  opts.multiplier_hands = 20000;
  TableAnalysis t = analyze_records(records, opts);
  EXPECT_EQ(t.records_used, 500);
  EXPECT_EQ(t.records_skipped, 0);
  ASSERT_EQ(t.players.size(), 1u);
  const PlayerPersona& p = t.players[0];
  EXPECT_EQ(p.player_id, "alice");
  EXPECT_EQ(p.hands, 500);
  EXPECT_DOUBLE_EQ(p.avg_bet, 25.0);
  EXPECT_GE(p.total_wagered, p.total_bet);
  EXPECT_EQ(p.skill.label(), "expert");
  EXPECT_FALSE(p.counting.flagged);
  EXPECT_TRUE(std::isfinite(p.est_theo_per_hour));
  ASSERT_EQ(p.samples.size(), 500u);

  // doubles and splits vary the wagered amounts, but the ramp analysis keys
  // on the opening bet, so a flat bettor hits the identity exactly anyway
  bool varied = false;
  for (const auto& s : p.samples) varied |= s.wagered != p.samples[0].wagered;
  EXPECT_TRUE(varied);
  EXPECT_EQ(p.holds.h_player, p.holds.h_flatbet);
  EXPECT_EQ(p.counting.advantage, 0.0);
  EXPECT_FALSE(p.counting.correlation.has_value());
}

TEST(AnalyzeRecords, CountReplayMatchesManualCount) {
  auto records = play_records(300, "basic", 35, 25, "alice");
  AnalyticsOptions opts;
  opts.multiplier_hands = 0;
  TableAnalysis t = analyze_records(records, opts);
  ASSERT_EQ(t.players.size(), 1u);
  const PlayerPersona& p = t.players[0];
  ASSERT_EQ(p.samples.size(), records.size());

  CountState count;
  count.decks_total = 6;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].shuffle_before) count.reset();
    EXPECT_DOUBLE_EQ(p.samples[i].scaled, count.scaled()) << "hand " << i;
    for (Rank r : records[i].all_cards()) high_low_update(count, r);
  }
}

TEST(AnalyzeRecords, AlwaysStandBettorExactlyFlatIsUnflagged) {
  // always-stand never doubles or splits, so wagered == bet on every hand
  auto records = play_records(200, "always-stand", 36, 50, "dave");
  AnalyticsOptions opts;
  opts.multiplier_hands = 0;
  TableAnalysis t = analyze_records(records, opts);
  ASSERT_EQ(t.players.size(), 1u);
  const PlayerPersona& p = t.players[0];
  EXPECT_EQ(p.counting.advantage, 0.0);
  EXPECT_FALSE(p.counting.correlation.has_value());
  EXPECT_FALSE(p.counting.flagged);
  EXPECT_EQ(p.holds.h_player, p.holds.h_flatbet);
}

TEST(AnalyzeRecords, SeparatesPlayersAndSkipsIncompleteRecords) {
  auto a = play_records(40, "basic", 37, 25, "ann");
  auto b = play_records(40, "timid", 38, 75, "ben");
  std::vector<HandRecord> merged;
  for (int i = 0; i < 40; ++i) {
    merged.push_back(a[i]);
    merged.push_back(b[i]);
  }
  merged[5].complete = false;
  AnalyticsOptions opts;
  opts.multiplier_hands = 0;
  TableAnalysis t = analyze_records(merged, opts);
  EXPECT_EQ(t.records_used, 79);
  EXPECT_EQ(t.records_skipped, 1);
  ASSERT_EQ(t.players.size(), 2u);
  EXPECT_EQ(t.players[0].player_id, "ann");
  EXPECT_EQ(t.players[1].player_id, "ben");
  EXPECT_EQ(t.players[0].hands, 40);
  EXPECT_EQ(t.players[1].hands, 39);
  EXPECT_DOUBLE_EQ(t.players[1].avg_bet, 75.0);
}

TEST(AnalyzeRecords, PersonaJsonCarriesTheContract) {
  auto records = play_records(60, "basic", 39, 25, "erin");
  AnalyticsOptions opts;
  opts.multiplier_hands = 0;
  TableAnalysis t = analyze_records(records, opts);
  ASSERT_EQ(t.players.size(), 1u);
  json j = to_json(t.players[0]);
  EXPECT_EQ(j.at("player_id"), "erin");
  EXPECT_EQ(j.at("hands_played"), 60);
  EXPECT_DOUBLE_EQ(j.at("average_bet").get<double>(), 25.0);
  EXPECT_TRUE(j.contains("skill_score"));
  EXPECT_TRUE(j.contains("skill_theo_multiplier"));
  EXPECT_TRUE(j.contains("counting_correlation"));
  EXPECT_TRUE(j.contains("counting_advantage"));
  EXPECT_TRUE(j.contains("counting_flagged"));
  double score = j.at("skill_score").get<double>();
  EXPECT_GE(score, 0.0);
  EXPECT_LE(score, 1.0);
}

}  // namespace
}  // namespace pitboss
