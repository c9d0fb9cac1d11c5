#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "pitboss/counting.hpp"
#include "pitboss/play.hpp"
#include "pitboss/rng.hpp"
#include "pitboss/rules.hpp"
#include "pitboss/strategy.hpp"

namespace pitboss {

enum class BetMode { Flat, Spread };

/// Count-keyed bet ramp: minimum below a scaled count of 1, then stepping up
/// through the classic multiples and capping at the table maximum.
inline double spread_bet(double scaled, double bet_min, double bet_max) {
  static constexpr double mult[] = {2, 4, 6, 8, 12};
  if (scaled < 1) return bet_min;
  int step = std::min(4, static_cast<int>(scaled) - 1);
  return std::min(bet_min * mult[step], bet_max);
}

struct SimConfig {
  RuleConfig rules;
  std::string policy_name = "basic";
  std::uint64_t seed = 1;
  std::uint64_t hands = 100000;
  double bet = 25;
  BetMode bet_mode = BetMode::Flat;
  double bet_max = 300;
  double hands_per_hour = 100;
  int threads = 1;
  bool keep_samples = false;
};

/// Per-hand trace, enough to study betting behavior against the count.
struct HandSample {
  double scaled_before = 0;
  double bet = 0;
  double wagered = 0;
  double net = 0;
};

struct SimResult {
  std::uint64_t hands = 0;
  double wagered = 0;
  double net = 0;
  std::vector<HandSample> samples;

  /// House hold: fraction of total wagered kept by the table.
  double hold() const { return wagered > 0 ? -net / wagered : 0; }
  /// Expected table win per hour at the given pace.
  double theo_per_hour(double hands_per_hour) const {
    return hands ? -net / static_cast<double>(hands) * hands_per_hour : 0;
  }
};

namespace detail {

inline constexpr std::uint64_t kBatchHands = 16384;

inline SimResult run_batch(const SimConfig& cfg, const Policy& policy,
                           std::uint64_t batch, std::uint64_t batch_hands) {
  Rng rng(derive_seed(cfg.seed, 2 * batch));
  Shoe shoe(cfg.rules.deck_count, derive_seed(cfg.seed, 2 * batch + 1),
            cfg.rules.penetration);
  CountState count;
  count.decks_total = cfg.rules.deck_count;

  SimResult out;
  if (cfg.keep_samples) out.samples.reserve(batch_hands);
  for (std::uint64_t i = 0; i < batch_hands; ++i) {
    bool shuffled = i == 0;  // every batch opens on a fresh shoe
    if (shoe.needs_shuffle()) {
      shoe.shuffle();
      shuffled = true;
    }
    if (shuffled) count.reset();

    const double scaled = count.scaled();
    const double bet = cfg.bet_mode == BetMode::Flat
                           ? cfg.bet
                           : spread_bet(scaled, cfg.bet, cfg.bet_max);
    HandRecord rec = play_hand(shoe, cfg.rules, policy, {SeatPlan{1, bet}}, rng, "",
                               shuffled);
    for (Rank r : rec.all_cards()) high_low_update(count, r);

    out.hands += 1;
    out.wagered += rec.wagered();
    out.net += rec.net();
    if (cfg.keep_samples)
      out.samples.push_back({scaled, bet, rec.wagered(), rec.net()});
  }
  return out;
}

}  // namespace detail

/// Runs the configured number of one-seat hands under `policy`. Work is cut
/// into fixed-size batches, each with its own seeded generator and shoe, so
/// totals are identical for any thread count.
inline SimResult simulate(const SimConfig& cfg, const Policy& policy) {
  cfg.rules.validate();
  if (cfg.hands == 0) throw std::domain_error("simulate: hands must be positive");
  const std::uint64_t batches =
      (cfg.hands + detail::kBatchHands - 1) / detail::kBatchHands;
  std::vector<SimResult> parts(batches);

  auto run_range = [&](std::atomic<std::uint64_t>& next) {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= batches) return;
      const std::uint64_t start = b * detail::kBatchHands;
      const std::uint64_t n = std::min(detail::kBatchHands, cfg.hands - start);
      parts[b] = detail::run_batch(cfg, policy, b, n);
    }
  };

  std::atomic<std::uint64_t> next{0};
  const int workers = std::max(1, cfg.threads);
  if (workers == 1) {
    run_range(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run_range, std::ref(next));
    for (auto& t : pool) t.join();
  }

  SimResult total;
  for (auto& p : parts) {
    total.hands += p.hands;
    total.wagered += p.wagered;
    total.net += p.net;
    if (cfg.keep_samples)
      total.samples.insert(total.samples.end(), p.samples.begin(), p.samples.end());
  }
  return total;
}

inline SimResult simulate(const SimConfig& cfg) {
  Policy policy = make_policy(cfg.policy_name, canonical_basic_table());
  return simulate(cfg, policy);
}

// ---------------------------------------------------------------------------
// Loss-rate comparison across playing policies.

struct TheoRow {
  std::string policy;
  std::uint64_t hands = 0;
  double hold = 0;
  double theo_per_hour = 0;
  double ratio = 0;  // against the first (baseline) policy
};

struct TheoReport {
  std::vector<TheoRow> rows;
  double baseline_theo = 0;
  bool unstable = false;  // baseline came out non-positive; ratios meaningless
};

inline TheoReport theo_ratio_report(const SimConfig& base,
                                    const std::vector<std::string>& policy_names) {
  if (policy_names.empty()) throw std::domain_error("theo report: no policies");
  TheoReport report;
  for (std::size_t i = 0; i < policy_names.size(); ++i) {
    SimConfig cfg = base;
    cfg.policy_name = policy_names[i];
    cfg.seed = derive_seed(base.seed, 0x7000 + i);
    cfg.keep_samples = false;
    SimResult r = simulate(cfg);
    TheoRow row;
    row.policy = policy_names[i];
    row.hands = r.hands;
    row.hold = r.hold();
    row.theo_per_hour = r.theo_per_hour(base.hands_per_hour);
    report.rows.push_back(row);
  }
  report.baseline_theo = report.rows.front().theo_per_hour;
  report.unstable = !(report.baseline_theo > 0);
  for (auto& row : report.rows)
    row.ratio = report.unstable ? std::nan("") : row.theo_per_hour / report.baseline_theo;
  return report;
}

// ---------------------------------------------------------------------------
// Hold as a function of the scaled count. States are drawn by rejection:
// burn a random prefix of a fresh shoe, keep it when the scaled count lands
// within the band around the bucket target, then deal one basic-strategy
// hand from what remains.

struct CountCurveConfig {
  RuleConfig rules;
  std::uint64_t seed = 1;
  std::uint64_t hands_per_bucket = 100000;
  double bucket_min = -2;
  double bucket_max = 6;
  double bucket_step = 1;
  double band = 0.4;
  double bet = 25;
  int threads = 1;
  std::uint64_t max_attempts_per_hand = 20000;
};

struct CountBucket {
  double target = 0;
  double mean_scaled = 0;  // average accepted count, the x used for fitting
  std::uint64_t hands = 0;
  double wagered = 0;
  double net = 0;
  bool starved = false;  // sampler hit the attempt cap before filling up

  double hold() const { return wagered > 0 ? -net / wagered : 0; }
};

namespace detail {

/// Number of marked items among n drawn without replacement from N items of
/// which K are marked. Inverse-CDF walk outward from the mode.
inline int hypergeometric(Rng& rng, int N, int K, int n) {
  const int lo = std::max(0, n + K - N);
  const int hi = std::min(K, n);
  if (lo >= hi) return lo;
  auto lchoose = [](int a, int b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  int mode = static_cast<int>((static_cast<double>(n) + 1) * (K + 1) / (N + 2));
  mode = std::clamp(mode, lo, hi);
  const double pm =
      std::exp(lchoose(K, mode) + lchoose(N - K, n - mode) - lchoose(N, n));
  auto up = [&](int k, double p) {
    return p * (static_cast<double>(K - k) * (n - k)) /
           (static_cast<double>(k + 1) * (N - K - n + k + 1));
  };
  auto down = [&](int k, double p) {
    return p * (static_cast<double>(k) * (N - K - n + k)) /
           (static_cast<double>(K - k + 1) * (n - k + 1));
  };
  const double u = rng.unit();
  double acc = pm;
  if (u < acc) return mode;
  double pl = pm, ph = pm;
  int l = mode, h = mode;
  for (;;) {
    bool moved = false;
    if (h < hi) {
      ph = up(h, ph);
      ++h;
      acc += ph;
      if (u < acc) return h;
      moved = true;
    }
    if (l > lo) {
      pl = down(l, pl);
      --l;
      acc += pl;
      if (u < acc) return l;
      moved = true;
    }
    if (!moved) return h;  // rounding slack: settle on the upper edge
  }
}

struct BurnState {
  int depth = 0;
  int low = 0;      // burned 2..6
  int neutral = 0;  // burned 7..9
  int high = 0;     // burned tens and aces
  double scaled = 0;
};

/// One candidate shoe state for a bucket target, or nothing when the draw
/// misses the acceptance band.
inline bool propose_state(Rng& rng, int total_cards, int jmin, int jmax, double target,
                          double band, BurnState& out) {
  const int cat = total_cards * 5 / 13;  // low == high size; neutral is the rest
  const int j = jmin + static_cast<int>(rng.below(static_cast<std::uint32_t>(jmax - jmin + 1)));
  const int l = hypergeometric(rng, total_cards, cat, j);
  const int h = hypergeometric(rng, total_cards - cat, cat, j - l);
  const double decks_left = (total_cards - j) / 52.0;
  const double scaled = (l - h) / decks_left;
  if (std::abs(scaled - target) > band) return false;
  out = {j, l, j - l - h, h, scaled};
  return true;
}

/// Expands a category-level burn into concrete remaining ranks, uniformly
/// over the card arrangements consistent with it.
inline std::vector<Rank> materialize_remaining(Rng& rng, int deck_count,
                                               const BurnState& burn) {
  const int per_rank = 4 * deck_count;
  std::array<int, 14> left{};
  for (int r = 1; r <= 13; ++r) left[r] = per_rank;
  auto burn_from = [&](std::initializer_list<int> ranks, int count) {
    std::vector<int> pool(ranks);
    for (int i = 0; i < count; ++i) {
      int total = 0;
      for (int r : pool) total += left[r];
      int pick = static_cast<int>(rng.below(static_cast<std::uint32_t>(total)));
      for (int r : pool) {
        if (pick < left[r]) {
          left[r] -= 1;
          break;
        }
        pick -= left[r];
      }
    }
  };
  burn_from({2, 3, 4, 5, 6}, burn.low);
  burn_from({7, 8, 9}, burn.neutral);
  burn_from({10, 11, 12, 13, 1}, burn.high);
  std::vector<Rank> remaining;
  remaining.reserve(static_cast<std::size_t>(deck_count) * 52 - burn.depth);
  for (int r = 1; r <= 13; ++r)
    remaining.insert(remaining.end(), left[r], static_cast<Rank>(r));
  rng.shuffle(remaining);
  return remaining;
}

inline CountBucket run_bucket_batch(const CountCurveConfig& cfg, const Policy& policy,
                                    double target, std::uint64_t stream,
                                    std::uint64_t batch_hands) {
  Rng rng(derive_seed(cfg.seed, stream));
  const int total = cfg.rules.deck_count * 52;
  // Burn window: leave at least half a deck untouched up front and a round's
  // worth of cards at the back. Large targets only occur deep, so start the
  // window later for them rather than rejecting millions of shallow burns.
  const int jmax = total - 31;
  int jmin = total / 12;
  if (std::abs(target) > 1.5)
    jmin = std::min(jmin + static_cast<int>(36 * (std::abs(target) - 1)),
                    (total * 2) / 3);

  CountBucket out;
  out.target = target;
  for (std::uint64_t i = 0; i < batch_hands; ++i) {
    BurnState burn;
    bool got = false;
    for (std::uint64_t attempt = 0; attempt < cfg.max_attempts_per_hand; ++attempt) {
      if (propose_state(rng, total, jmin, jmax, target, cfg.band, burn)) {
        got = true;
        break;
      }
    }
    if (!got) {
      out.starved = true;
      return out;
    }
    auto shoe = Shoe::from_sequence(materialize_remaining(rng, cfg.rules.deck_count, burn));
    try {
      HandRecord rec =
          play_hand(shoe, cfg.rules, policy, {SeatPlan{1, cfg.bet}}, rng);
      out.hands += 1;
      out.mean_scaled += burn.scaled;
      out.wagered += rec.wagered();
      out.net += rec.net();
    } catch (const std::domain_error&) {
      // ran the rigged shoe dry: freakishly long hand, drop it and move on
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<CountBucket> hold_vs_scaled_count(const CountCurveConfig& cfg) {
  cfg.rules.validate();
  if (cfg.hands_per_bucket == 0 || cfg.bucket_step <= 0 ||
      cfg.bucket_max < cfg.bucket_min)
    throw std::domain_error("count curve: bad bucket setup");
  Policy policy = make_policy("basic", canonical_basic_table());

  std::vector<double> targets;
  for (double x = cfg.bucket_min; x <= cfg.bucket_max + 1e-9; x += cfg.bucket_step)
    targets.push_back(x);

  constexpr std::uint64_t kBucketBatch = 8192;
  const std::uint64_t batches_per_bucket =
      (cfg.hands_per_bucket + kBucketBatch - 1) / kBucketBatch;
  struct Job {
    std::size_t bucket;
    std::uint64_t batch;
    std::uint64_t hands;
  };
  std::vector<Job> jobs;
  for (std::size_t b = 0; b < targets.size(); ++b)
    for (std::uint64_t k = 0; k < batches_per_bucket; ++k) {
      const std::uint64_t start = k * kBucketBatch;
      jobs.push_back({b, k, std::min(kBucketBatch, cfg.hands_per_bucket - start)});
    }

  std::vector<CountBucket> parts(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      parts[i] = detail::run_bucket_batch(cfg, policy, targets[job.bucket],
                                          job.bucket * 65536 + job.batch, job.hands);
    }
  };
  const int workers = std::max(1, cfg.threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<CountBucket> buckets(targets.size());
  for (std::size_t b = 0; b < targets.size(); ++b) buckets[b].target = targets[b];
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    CountBucket& acc = buckets[jobs[i].bucket];
    acc.hands += parts[i].hands;
    acc.mean_scaled += parts[i].mean_scaled;
    acc.wagered += parts[i].wagered;
    acc.net += parts[i].net;
    acc.starved |= parts[i].starved;
  }
  for (auto& b : buckets)
    if (b.hands) b.mean_scaled /= static_cast<double>(b.hands);
  return buckets;
}

}  // namespace pitboss
