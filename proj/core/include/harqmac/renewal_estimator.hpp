#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "harqmac/sim_report.hpp"

namespace harqmac {

/// Ratio estimate with a 3-sigma half-width.
struct RatioEstimate {
  double value = 0.0;
  double halfwidth = 0.0;
};

/// Renewal-reward accumulator.
///
/// Slots are appended one at a time; mark_renewal() closes the current cycle.
/// Cycles are grouped into fixed-size batches and the ratio estimators
/// sum(reward)/sum(length) are given delta-method confidence intervals over
/// the batch totals. Quantities after the last renewal are discarded.
class RenewalEstimator {
 public:
  /// `cycles_per_batch` >= 1; `channels` is the number of power channels (users).
  RenewalEstimator(std::int64_t cycles_per_batch, int channels);

  void add_slot(double reward, std::span<const double> power);
  void add_slot(double reward, double total_power);
  void mark_renewal();

  std::int64_t cycles() const { return cycles_; }
  std::int64_t complete_slots() const { return complete_slots_; }

  RatioEstimate throughput() const;
  /// Average over channels of the per-channel power.
  RatioEstimate power_per_channel() const;
  std::vector<double> channel_power() const;
  RatioEstimate cycle_length() const;

 private:
  struct Batch {
    double reward = 0.0;
    double length = 0.0;
    double power = 0.0;
    double cycles = 0.0;
  };

  RatioEstimate ratio(double Batch::*numerator, double Batch::*denominator, double scale) const;

  std::int64_t cycles_per_batch_;
  int channels_;
  Batch open_cycle_;
  std::vector<double> open_channel_power_;
  Batch open_batch_;
  std::vector<Batch> batches_;
  std::vector<double> channel_power_;
  std::int64_t cycles_ = 0;
  std::int64_t complete_slots_ = 0;
};

/// Batch size giving roughly a thousand batches over a run of `slots` slots.
std::int64_t default_batch_cycles(std::int64_t slots);

/// Fills the estimate fields of a report (histograms are left untouched).
void fill_report(const RenewalEstimator& estimator, std::int64_t slots, SimReport& report);

}  // namespace harqmac
