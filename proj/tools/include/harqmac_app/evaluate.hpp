#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "harqmac/sim_report.hpp"
#include "harqmac_app/config.hpp"

namespace harqmac::app {

/// Structural choice of one policy run.
struct PolicySetup {
  PolicyKind kind = PolicyKind::CdTdmaOnOff;
  int users = 2;
  int attempts = 1;
  int levels = 1;

  /// Throws ConfigError for combinations without an analytic model
  /// (K != 2 for joint, joint_tdma and cdtdma_alo; M != 2 for cdtdma_alo;
  /// M > 1 on single-shot policies; L > 1 outside multilevel and INR).
  void validate() const;
  int feedback_size() const;
};

struct EvalOptions {
  PowerConvention convention = PowerConvention::Standard;
  bool simulate = false;
  std::int64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  InrShortfall early_shortfall = InrShortfall::Silent;
  InrShortfall final_shortfall = InrShortfall::Silent;
};

struct PointResult {
  double snr_db = 0.0;
  double pbar = 0.0;
  PolicySetup setup;
  ThroughputPoint point;
  double normalized = 0.0;  ///< against the configured convention
  std::optional<SimReport> sim;
};

/// 10^(snr_db / 10).
double snr_to_power(double snr_db);

/// Optimized operating point of a policy at per-user power pbar.
ThroughputPoint optimize_policy(const PolicySetup& setup, double pbar, const EvalOptions& options);

/// Optimizes, normalizes and (optionally) simulates one point. `seed` feeds
/// the simulation and the INR evaluation.
PointResult evaluate_point(const PolicySetup& setup, double snr_db, const EvalOptions& options,
                           std::uint64_t seed);

/// Runs every (snr, policy) point on a worker pool. The result is sorted by
/// (policy name, snr) and does not depend on the thread count.
std::vector<PointResult> run_sweep(const SweepConfig& config);

/// Per-point seed derived from the sweep seed and the point coordinates.
std::uint64_t point_seed(std::uint64_t seed, std::size_t snr_index, PolicyKind kind);

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<PointResult>& rows);

}  // namespace harqmac::app
