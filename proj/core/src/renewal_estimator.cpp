#include "harqmac/renewal_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "harqmac/error.hpp"

namespace harqmac {

RenewalEstimator::RenewalEstimator(std::int64_t cycles_per_batch, int channels)
    : cycles_per_batch_(cycles_per_batch),
      channels_(channels),
      open_channel_power_(static_cast<std::size_t>(channels), 0.0),
      channel_power_(static_cast<std::size_t>(channels), 0.0) {
  if (cycles_per_batch < 1 || channels < 1) {
    throw ConfigError("RenewalEstimator: batch size and channel count must be >= 1");
  }
}

void RenewalEstimator::add_slot(double reward, std::span<const double> power) {
  open_cycle_.reward += reward;
  open_cycle_.length += 1.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    open_cycle_.power += power[k];
    open_channel_power_[k] += power[k];
  }
}

void RenewalEstimator::add_slot(double reward, double total_power) {
  open_cycle_.reward += reward;
  open_cycle_.length += 1.0;
  open_cycle_.power += total_power;
  open_channel_power_[0] += total_power;
}

void RenewalEstimator::mark_renewal() {
  open_batch_.reward += open_cycle_.reward;
  open_batch_.length += open_cycle_.length;
  open_batch_.power += open_cycle_.power;
  open_batch_.cycles += 1.0;
  for (int k = 0; k < channels_; ++k) {
    channel_power_[k] += open_channel_power_[k];
    open_channel_power_[k] = 0.0;
  }
  complete_slots_ += static_cast<std::int64_t>(open_cycle_.length);
  open_cycle_ = {};
  ++cycles_;
  if (static_cast<std::int64_t>(open_batch_.cycles) == cycles_per_batch_) {
    batches_.push_back(open_batch_);
    open_batch_ = {};
  }
}

RatioEstimate RenewalEstimator::ratio(double Batch::*numerator, double Batch::*denominator,
                                      double scale) const {
  std::vector<Batch> all = batches_;
  if (open_batch_.cycles > 0.0) all.push_back(open_batch_);
  RatioEstimate out;
  double num = 0.0;
  double den = 0.0;
  for (const Batch& b : all) {
    num += b.*numerator;
    den += b.*denominator;
  }
  if (den <= 0.0) return out;
  out.value = scale * num / den;
  const auto n = static_cast<double>(all.size());
  if (all.size() < 2) {
    out.halfwidth = std::numeric_limits<double>::infinity();
    return out;
  }
  const double theta = num / den;
  double ss = 0.0;
  for (const Batch& b : all) {
    const double r = b.*numerator - theta * (b.*denominator);
    ss += r * r;
  }
  const double mean_den = den / n;
  out.halfwidth = 3.0 * scale * std::sqrt(ss / (n * (n - 1.0))) / mean_den;
  return out;
}

RatioEstimate RenewalEstimator::throughput() const {
  return ratio(&Batch::reward, &Batch::length, 1.0);
}

RatioEstimate RenewalEstimator::power_per_channel() const {
  return ratio(&Batch::power, &Batch::length, 1.0 / channels_);
}

std::vector<double> RenewalEstimator::channel_power() const {
  std::vector<double> out(channel_power_);
  if (complete_slots_ > 0) {
    for (double& p : out) p /= static_cast<double>(complete_slots_);
  }
  return out;
}

RatioEstimate RenewalEstimator::cycle_length() const {
  return ratio(&Batch::length, &Batch::cycles, 1.0);
}

std::int64_t default_batch_cycles(std::int64_t slots) {
  return std::max<std::int64_t>(1, slots / 1000);
}

void fill_report(const RenewalEstimator& estimator, std::int64_t slots, SimReport& report) {
  const RatioEstimate thr = estimator.throughput();
  const RatioEstimate pw = estimator.power_per_channel();
  const RatioEstimate cyc = estimator.cycle_length();
  report.throughput_est = thr.value;
  report.ci_halfwidth_throughput = thr.halfwidth;
  report.power_est = pw.value;
  report.ci_halfwidth_power = pw.halfwidth;
  report.mean_cycle_length = cyc.value;
  report.ci_halfwidth_cycle = cyc.halfwidth;
  report.renewals = estimator.cycles();
  report.slots = slots;
  report.user_power = estimator.channel_power();
}

}  // namespace harqmac
