#include "pitboss/strategy.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "oracles.hpp"

namespace pitboss {
namespace {

using Kind = HandClass::Kind;

TEST(Classify, PairsBeatSoftAndHard) {
  EXPECT_EQ(classify_hand(std::vector<Rank>{1, 1}), (HandClass{Kind::Pair, 1}));
  EXPECT_EQ(classify_hand(std::vector<Rank>{8, 8}), (HandClass{Kind::Pair, 8}));
  EXPECT_EQ(classify_hand(std::vector<Rank>{13, 13}), (HandClass{Kind::Pair, 13}));
}

TEST(Classify, TenValueMixIsNotAPair) {
  // Jack + ten have equal value but different ranks.
  EXPECT_EQ(classify_hand(std::vector<Rank>{10, 11}), (HandClass{Kind::Hard, 20}));
}

TEST(Classify, SoftAndHardByAce) {
  EXPECT_EQ(classify_hand(std::vector<Rank>{1, 7}), (HandClass{Kind::Soft, 18}));
  EXPECT_EQ(classify_hand(std::vector<Rank>{1, 7, 9}), (HandClass{Kind::Hard, 17}));
  EXPECT_EQ(classify_hand(std::vector<Rank>{5, 4}), (HandClass{Kind::Hard, 9}));
  EXPECT_EQ(classify_hand(std::vector<Rank>{1, 1, 9}), (HandClass{Kind::Soft, 21}));
}

TEST(Classify, RejectsBustedHands) {
  EXPECT_THROW(classify_hand(std::vector<Rank>{10, 9, 5}), std::domain_error);
}

TEST(StrategyRows, RoundTripAllRows) {
  for (int row = 0; row < kTableRows; ++row) {
    HandClass hc = row_class(row);
    EXPECT_EQ(strategy_row(hc), row);
    EXPECT_EQ(class_from_label(row_label(hc)), hc);
  }
  EXPECT_THROW(strategy_row({Kind::Hard, 21}), std::out_of_range);
  EXPECT_THROW(strategy_row({Kind::Soft, 12}), std::out_of_range);
  EXPECT_THROW(class_from_label("X9"), std::invalid_argument);
}

TEST(StrategyCsv, CanonicalRoundTrips) {
  const StrategyTable& t = canonical_basic_table();
  StrategyTable back = StrategyTable::from_csv(t.to_csv());
  EXPECT_EQ(back, t);
  EXPECT_EQ(t.to_csv(), std::string(kCanonicalBasicCsv));
}

TEST(StrategyCsv, ShippedChartFileMatchesBuiltin) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/basic_s17.csv");
  ASSERT_TRUE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), std::string(kCanonicalBasicCsv));
}

TEST(StrategyCsv, RejectsMalformedCharts) {
  EXPECT_THROW(StrategyTable::from_csv(""), std::invalid_argument);
  EXPECT_THROW(StrategyTable::from_csv("class,2,3\nH5,H,H\n"), std::invalid_argument);
  // drop one row
  std::string csv(kCanonicalBasicCsv);
  auto pos = csv.find("P9,");
  auto end = csv.find('\n', pos);
  csv.erase(pos, end - pos + 1);
  EXPECT_THROW(StrategyTable::from_csv(csv), std::invalid_argument);
  // duplicate a row
  std::string dup(kCanonicalBasicCsv);
  dup += "H5,H,H,H,H,H,H,H,H,H,H\n";
  EXPECT_THROW(StrategyTable::from_csv(dup), std::invalid_argument);
  // bad cell
  std::string bad(kCanonicalBasicCsv);
  bad[bad.find("H5,H") + 3] = 'Q';
  EXPECT_THROW(StrategyTable::from_csv(bad), std::invalid_argument);
}

TEST(Lookup, UsesChartOnFirstDecision) {
  const StrategyTable& t = canonical_basic_table();
  PlayContext first{true, true, true};
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{6, 5}, 6, first), Action::DoubleDown);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{8, 8}, 10, first), Action::Split);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{1, 7}, 9, first), Action::Hit);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{10, 6}, 10, first), Action::Hit);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{10, 2}, 2, first), Action::Hit);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{10, 2}, 4, first), Action::Stand);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{10, 3}, 2, first), Action::Stand);
}

TEST(Lookup, DoubleDegradesToHitOnThreeCards) {
  const StrategyTable& t = canonical_basic_table();
  PlayContext later{false, false, false};
  // 2+3+6 = hard 11, chart says double, three cards cannot
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{2, 3, 6}, 5, later), Action::Hit);
}

TEST(Lookup, DoubleUnavailableFallsBackBySoftness) {
  const StrategyTable& t = canonical_basic_table();
  PlayContext no_double{true, false, true};
  // soft 18 doubles against 3; without the option it stands
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{1, 7}, 3, no_double), Action::Stand);
  // soft 15 doubles against 4; without the option it hits
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{1, 4}, 4, no_double), Action::Hit);
  // hard 11 doubles; without the option it hits
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{6, 5}, 6, no_double), Action::Hit);
}

TEST(Lookup, BlockedSplitReclassifies) {
  const StrategyTable& t = canonical_basic_table();
  PlayContext no_split{true, true, false};
  // 6,6 plays as hard 12
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{6, 6}, 3, no_split), Action::Hit);
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{6, 6}, 4, no_split), Action::Stand);
  // A,A plays as soft 12, below the chart floor: hit
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{1, 1}, 6, no_split), Action::Hit);
  // 2,2 plays as hard 4, below the chart floor: hit
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{2, 2}, 5, no_split), Action::Hit);
  // 5,5 plays as hard 10 and may still double
  EXPECT_EQ(lookup_action(t, std::vector<Rank>{5, 5}, 6, no_split), Action::DoubleDown);
}

TEST(Lookup, RejectsShortHands) {
  PlayContext first;
  EXPECT_THROW(lookup_action(canonical_basic_table(), std::vector<Rank>{5}, 5, first),
               std::domain_error);
}

// Exhaustive check of the shipped chart against exact expected values on an
// infinite shoe. Cells whose two best actions sit within the tie margin are
// skipped: finite-shoe composition effects decide those, and the chart's
// choice is taken on trust there.
TEST(CanonicalChart, AgreesWithExactEvOutsideNearTies) {
  const StrategyTable& t = canonical_basic_table();
  const double tie_margin = 0.006;
  int near_ties = 0;
  std::vector<std::string> wrong;
  for (int up = 1; up <= 10; ++up) {
    for (int row = 0; row < kTableRows; ++row) {
      HandClass hc = row_class(row);
      auto evs = oracle::cell_evs(hc, up, false);
      struct Cand { Action a; double ev; };
      std::vector<Cand> cands{{Action::Stand, evs.stand},
                              {Action::Hit, evs.hit},
                              {Action::DoubleDown, evs.dbl}};
      if (hc.kind == Kind::Pair) cands.push_back({Action::Split, evs.split});
      Cand best = cands[0];
      for (auto& c : cands)
        if (c.ev > best.ev) best = c;
      Action chart = t.at(hc, up);
      double chart_ev = 0;
      for (auto& c : cands)
        if (c.a == chart) chart_ev = c.ev;
      if (chart == best.a) continue;
      if (best.ev - chart_ev < tie_margin) {
        ++near_ties;
        continue;
      }
      wrong.push_back(row_label(hc) + " vs " + std::to_string(up) + ": chart " +
                      to_string(chart) + ", best " + to_string(best.a) + " by " +
                      std::to_string(best.ev - chart_ev));
    }
  }
  EXPECT_TRUE(wrong.empty()) << wrong.size() << " cells off, first: " << wrong[0];
  EXPECT_LT(near_ties, 20);
}

TEST(Policies, MimicDealerHitsBelowSeventeen) {
  Rng rng(1);
  auto p = make_policy("mimic-dealer", canonical_basic_table());
  PlayContext first{true, true, false};
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 6}, 10, first, rng), Action::Hit);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 7}, 10, first, rng), Action::Stand);
  // stands on soft 17, like the dealer it copies
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{1, 6}, 10, first, rng), Action::Stand);
}

TEST(Policies, NeverBustStopsAtTwelve) {
  Rng rng(1);
  auto p = make_policy("never-bust", canonical_basic_table());
  PlayContext first{true, true, false};
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{6, 5}, 10, first, rng), Action::Hit);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 2}, 2, first, rng), Action::Stand);
  // soft hands cannot bust on one card, but this player stands anyway
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{1, 2}, 10, first, rng), Action::Stand);
}

TEST(Policies, AlwaysStandReallyDoes) {
  Rng rng(1);
  auto p = make_policy("always-stand", canonical_basic_table());
  PlayContext first{true, true, false};
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{2, 3}, 10, first, rng), Action::Stand);
}

TEST(Policies, TimidNeverDoublesOrSplits) {
  Rng rng(1);
  auto p = make_policy("timid", canonical_basic_table());
  PlayContext first{true, true, true};
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{6, 5}, 6, first, rng), Action::Hit);
  // refused split leaves hard 16 against a six: stand
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{8, 8}, 6, first, rng), Action::Stand);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{8, 8}, 10, first, rng), Action::Hit);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{1, 7}, 3, first, rng), Action::Stand);
}

TEST(Policies, RandomLegalStaysLegalAndDeterministic) {
  auto p = make_policy("random-legal", canonical_basic_table());
  PlayContext first{true, true, true};
  PlayContext later{false, false, false};
  Rng a(5), b(5);
  std::set<Action> seen;
  for (int i = 0; i < 200; ++i) {
    Action x = policy_decide(p, std::vector<Rank>{8, 8}, 5, first, a);
    EXPECT_EQ(x, policy_decide(p, std::vector<Rank>{8, 8}, 5, first, b));
    seen.insert(x);
    Action y = policy_decide(p, std::vector<Rank>{8, 8, 2}, 5, later, a);
    EXPECT_TRUE(y == Action::Hit || y == Action::Stand);
    policy_decide(p, std::vector<Rank>{8, 8, 2}, 5, later, b);
  }
  EXPECT_EQ(seen.size(), 4u);  // all four actions show up on a split-able pair
}

TEST(Policies, BasicFollowsChart) {
  Rng rng(1);
  auto p = make_policy("basic", canonical_basic_table());
  PlayContext first{true, true, true};
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{1, 1}, 10, first, rng), Action::Split);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 6}, 7, first, rng), Action::Hit);
}

TEST(Policies, DecisionPastTwentyOneIsALogicError) {
  Rng rng(1);
  auto p = make_policy("basic", canonical_basic_table());
  PlayContext later{false, false, false};
  EXPECT_THROW(policy_decide(p, std::vector<Rank>{10, 5, 6}, 5, later, rng),
               std::logic_error);
}

TEST(Policies, UnknownNameThrows) {
  EXPECT_THROW(make_policy("martingale", canonical_basic_table()),
               std::invalid_argument);
}

TEST(Policies, EmpiricalOverridesObservedCellsOnly) {
  Rng rng(1);
  Policy p;
  p.kind = PolicyKind::Empirical;
  p.name = "player-x";
  p.table = &canonical_basic_table();
  p.cells[Policy::cell_key({Kind::Hard, 16}, 10)] = Action::Stand;
  PlayContext first{true, true, false};
  // observed habit wins in its cell
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 6}, 10, first, rng), Action::Stand);
  // unobserved cells fall back to the chart
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 6}, 6, first, rng), Action::Stand);
  EXPECT_EQ(policy_decide(p, std::vector<Rank>{10, 5}, 10, first, rng), Action::Hit);
}

}  // namespace
}  // namespace pitboss
