#pragma once

#include <cstdint>
#include <vector>

namespace harqmac {

/// Monte Carlo estimates from one simulation run. Half-widths are 3 sigma
/// (batch means over renewal cycles, ratio estimator).
struct SimReport {
  double throughput_est = 0.0;  ///< nats per channel use, summed over users
  double power_est = 0.0;       ///< long-term average power per user
  double ci_halfwidth_throughput = 0.0;
  double ci_halfwidth_power = 0.0;
  double mean_cycle_length = 0.0;  ///< slots between renewals
  double ci_halfwidth_cycle = 0.0;
  std::int64_t renewals = 0;
  std::int64_t slots = 0;
  std::vector<double> user_power;                ///< per-user average power
  std::vector<std::int64_t> feedback_histogram;  ///< one bin per feedback symbol
  std::vector<double> state_occupancy;           ///< fraction of slots per protocol state, when tracked
};

}  // namespace harqmac
