#include "pitboss/simulate.hpp"

#include <gtest/gtest.h>

#include <map>

namespace pitboss {
namespace {

TEST(Simulate, AccountingAddsUpAcrossSamples) {
  SimConfig cfg;
  cfg.hands = 30000;
  cfg.seed = 11;
  cfg.keep_samples = true;
  SimResult r = simulate(cfg);
  EXPECT_EQ(r.hands, cfg.hands);
  ASSERT_EQ(r.samples.size(), cfg.hands);
  double net = 0, wagered = 0;
  for (const auto& s : r.samples) {
    net += s.net;
    wagered += s.wagered;
    EXPECT_GE(s.wagered, s.bet);       // doubles and splits only add
    EXPECT_LE(s.wagered, 4 * s.bet);   // two split hands, both doubled
  }
  EXPECT_DOUBLE_EQ(net, r.net);
  EXPECT_DOUBLE_EQ(wagered, r.wagered);
  EXPECT_GE(r.wagered, cfg.bet * cfg.hands);
}

TEST(Simulate, BasicHoldLandsNearHalfAPercent) {
  SimConfig cfg;
  cfg.hands = 200000;
  cfg.seed = 5;
  SimResult r = simulate(cfg);
  // loose gate at this sample size; the acceptance run uses a million hands
  EXPECT_GT(r.hold(), -0.004);
  EXPECT_LT(r.hold(), 0.014);
}

TEST(Simulate, IdenticalForAnyThreadCount) {
  SimConfig cfg;
  cfg.hands = 50000;
  cfg.seed = 3;
  cfg.threads = 1;
  SimResult one = simulate(cfg);
  cfg.threads = 4;
  SimResult four = simulate(cfg);
  EXPECT_EQ(one.hands, four.hands);
  EXPECT_EQ(one.net, four.net);          // bitwise, not approximately
  EXPECT_EQ(one.wagered, four.wagered);
  SimResult again = simulate(cfg);
  EXPECT_EQ(again.net, four.net);
}

TEST(Simulate, SeedChangesTheRun) {
  SimConfig cfg;
  cfg.hands = 20000;
  cfg.seed = 1;
  SimResult a = simulate(cfg);
  cfg.seed = 2;
  SimResult b = simulate(cfg);
  EXPECT_NE(a.net, b.net);
}

TEST(Simulate, RejectsZeroHands) {
  SimConfig cfg;
  cfg.hands = 0;
  EXPECT_THROW(simulate(cfg), std::domain_error);
}

TEST(SpreadBet, RampsWithTheCount) {
  EXPECT_DOUBLE_EQ(spread_bet(-2, 25, 300), 25);
  EXPECT_DOUBLE_EQ(spread_bet(0.9, 25, 300), 25);
  EXPECT_DOUBLE_EQ(spread_bet(1.0, 25, 300), 50);
  EXPECT_DOUBLE_EQ(spread_bet(2.4, 25, 300), 100);
  EXPECT_DOUBLE_EQ(spread_bet(5.0, 25, 300), 300);
  EXPECT_DOUBLE_EQ(spread_bet(9.0, 25, 300), 300);
  EXPECT_DOUBLE_EQ(spread_bet(3.0, 50, 200), 200);  // cap kicks in
}

TEST(Simulate, SpreadModeVariesBetsWithCount) {
  SimConfig cfg;
  cfg.hands = 40000;
  cfg.seed = 9;
  cfg.bet_mode = BetMode::Spread;
  cfg.keep_samples = true;
  SimResult r = simulate(cfg);
  std::map<double, int> bets;
  double high_sum = 0, low_sum = 0;
  std::uint64_t high_n = 0, low_n = 0;
  for (const auto& s : r.samples) {
    bets[s.bet] += 1;
    if (s.scaled_before >= 1) {
      high_sum += s.bet;
      ++high_n;
    } else {
      low_sum += s.bet;
      ++low_n;
    }
  }
  EXPECT_GT(bets.size(), 2u);
  ASSERT_GT(high_n, 0u);
  ASSERT_GT(low_n, 0u);
  EXPECT_GT(high_sum / high_n, low_sum / low_n);
  EXPECT_DOUBLE_EQ(low_sum / low_n, 25.0);  // never raises below the trigger
}

TEST(TheoReport, RanksSloppyPlayAboveBasic) {
  SimConfig cfg;
  cfg.hands = 300000;
  cfg.seed = 17;
  TheoReport rep = theo_ratio_report(cfg, {"basic", "timid", "never-bust", "mimic-dealer"});
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_FALSE(rep.unstable);
  EXPECT_DOUBLE_EQ(rep.rows[0].ratio, 1.0);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    EXPECT_GT(rep.rows[i].ratio, 1.0) << rep.rows[i].policy;
    EXPECT_GT(rep.rows[i].theo_per_hour, 0.0) << rep.rows[i].policy;
  }
  EXPECT_EQ(rep.rows[1].hands, cfg.hands);
}

TEST(CountCurve, BucketsFillInsideTheBandAndTrendDown) {
  CountCurveConfig cfg;
  cfg.seed = 21;
  cfg.hands_per_bucket = 4000;
  cfg.bucket_min = -1;
  cfg.bucket_max = 3;
  cfg.threads = 2;
  auto buckets = hold_vs_scaled_count(cfg);
  ASSERT_EQ(buckets.size(), 5u);
  for (const auto& b : buckets) {
    EXPECT_FALSE(b.starved) << "bucket " << b.target;
    EXPECT_EQ(b.hands, cfg.hands_per_bucket);
    EXPECT_NEAR(b.mean_scaled, b.target, cfg.band);
    EXPECT_GT(b.wagered, 0.0);
  }
  // low-count hold should exceed high-count hold well beyond noise here
  EXPECT_GT(buckets.front().hold(), buckets.back().hold());
}

TEST(CountCurve, DeterministicAcrossThreadCounts) {
  CountCurveConfig cfg;
  cfg.seed = 8;
  cfg.hands_per_bucket = 2000;
  cfg.bucket_min = 0;
  cfg.bucket_max = 2;
  cfg.threads = 1;
  auto one = hold_vs_scaled_count(cfg);
  cfg.threads = 3;
  auto three = hold_vs_scaled_count(cfg);
  ASSERT_EQ(one.size(), three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].net, three[i].net);
    EXPECT_EQ(one[i].wagered, three[i].wagered);
    EXPECT_EQ(one[i].mean_scaled, three[i].mean_scaled);
  }
}

}  // namespace
}  // namespace pitboss
