#include <gtest/gtest.h>

#include <cmath>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"
#include "harqmac/renewal_estimator.hpp"

using namespace harqmac;

TEST(RenewalEstimator, DeterministicCyclesHaveZeroWidth) {
  RenewalEstimator est(10, 2);
  const double power[2] = {1.0, 3.0};
  for (int c = 0; c < 100; ++c) {
    est.add_slot(0.0, power);
    est.add_slot(2.0, power);
    est.mark_renewal();
  }
  EXPECT_DOUBLE_EQ(est.throughput().value, 1.0);
  EXPECT_NEAR(est.throughput().halfwidth, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(est.power_per_channel().value, 2.0);
  EXPECT_DOUBLE_EQ(est.cycle_length().value, 2.0);
  EXPECT_EQ(est.channel_power(), (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(est.cycles(), 100);
  EXPECT_EQ(est.complete_slots(), 200);
}

TEST(RenewalEstimator, OpenCycleIsDiscarded) {
  RenewalEstimator est(1, 1);
  est.add_slot(1.0, 1.0);
  est.mark_renewal();
  est.add_slot(100.0, 100.0);
  EXPECT_DOUBLE_EQ(est.throughput().value, 1.0);
  EXPECT_DOUBLE_EQ(est.power_per_channel().value, 1.0);
  EXPECT_EQ(est.complete_slots(), 1);
}

TEST(RenewalEstimator, IidSlotsMatchBinomialInterval) {
  const std::int64_t n = 1'000'000;
  const double p = 0.3;
  RenewalEstimator est(default_batch_cycles(n), 1);
  Rng rng(21);
  for (std::int64_t i = 0; i < n; ++i) {
    est.add_slot(rng.uniform() < p ? 1.0 : 0.0, 0.0);
    est.mark_renewal();
  }
  const RatioEstimate t = est.throughput();
  const double binomial = 3.0 * std::sqrt(p * (1.0 - p) / n);
  EXPECT_NEAR(t.value, p, t.halfwidth);
  EXPECT_NEAR(t.halfwidth / binomial, 1.0, 0.1);
}

TEST(RenewalEstimator, FillReport) {
  RenewalEstimator est(2, 1);
  for (int c = 0; c < 10; ++c) {
    est.add_slot(1.0, 0.5);
    est.mark_renewal();
  }
  SimReport r;
  r.feedback_histogram = {7};
  fill_report(est, 10, r);
  EXPECT_DOUBLE_EQ(r.throughput_est, 1.0);
  EXPECT_DOUBLE_EQ(r.power_est, 0.5);
  EXPECT_EQ(r.renewals, 10);
  EXPECT_EQ(r.slots, 10);
  EXPECT_EQ(r.feedback_histogram, std::vector<std::int64_t>{7});
}

TEST(RenewalEstimator, BatchSizing) {
  EXPECT_EQ(default_batch_cycles(10), 1);
  EXPECT_EQ(default_batch_cycles(1'000'000), 1000);
  EXPECT_THROW(RenewalEstimator(0, 1), ConfigError);
  EXPECT_THROW(RenewalEstimator(1, 0), ConfigError);
}
