#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harqmac/inr.hpp"
#include "harqmac/optimizer.hpp"

namespace harqmac {

enum class PolicyKind {
  StaticTdma,
  JointDecoding,
  JointPlusTdma,
  CdTdmaOn,
  CdTdmaOnOff,
  MultilevelCdTdma,
  CdTdmaAlo,
  CdTdmaInr,
};

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::StaticTdma,  PolicyKind::JointDecoding,    PolicyKind::JointPlusTdma,
    PolicyKind::CdTdmaOn,    PolicyKind::CdTdmaOnOff,      PolicyKind::MultilevelCdTdma,
    PolicyKind::CdTdmaAlo,   PolicyKind::CdTdmaInr,
};

/// CLI / CSV spelling: static_tdma, joint, joint_tdma, cdtdma_on, cdtdma_onoff,
/// multilevel, cdtdma_alo, cdtdma_inr.
std::string_view policy_name(PolicyKind kind);
PolicyKind parse_policy(std::string_view name);

/// Feedback alphabet size the policy needs for K users and L power levels.
int implied_feedback_size(PolicyKind kind, int users, int levels = 1);

/// Free parameters of a policy at a given operating point.
///
/// `thresholds` holds s (single threshold policies), s_1 < ... < s_L
/// (multilevel), or {s_single, s_joint} (joint + TDMA). `rate` is derived from
/// the thresholds and the power constraint and kept for traceability.
struct PolicyParams {
  PolicyKind kind = PolicyKind::CdTdmaOnOff;
  std::vector<double> thresholds;
  double time_share = 0.0;   ///< tau, joint + TDMA only
  double power_share = 0.0;  ///< alpha, joint + TDMA only
  int levels = 1;
  int attempts = 1;
  double rate = 0.0;
  InrLevels inr;             ///< cdTDMA + INR only

  /// Throws ConfigError on unordered thresholds or shares outside [0, 1].
  void validate() const;
  /// "name=value" pairs joined by ';' (CSV params column).
  std::string describe() const;
};

/// Optimized operating point of a policy.
struct ThroughputPoint {
  double avg_power = 0.0;   ///< per-user long-term budget
  double throughput = 0.0;  ///< sum throughput, nats per channel use
  PolicyParams params;
  double normalized = 0.0;  ///< throughput / ewfc_benchmark(K, avg_power)
  double uncertainty = 0.0; ///< 3-sigma half-width when throughput is a Monte Carlo estimate
};

// Objectives as functions of their free parameters (symmetric users).

/// e^{-s} ln(1 + s P); static TDMA with P = K * per-user power.
double single_user_objective(double power, double s);
double static_tdma_objective(int users, double power, double s);
/// Symmetric two-user joint decoding closed form.
double joint_decoding_objective(double power, double s);
/// tau eta_single(2 alpha P / tau) + (1 - tau) eta_joint((1 - alpha) P / (1 - tau)).
double joint_plus_tdma_objective(double power, double time_share, double power_share,
                                 const OptimizerConfig& config = {});
/// ln(1 + s K P) (1 - (1 - e^{-s})^K).
double cdtdma_on_objective(int users, double power, double s);
/// ln(1 + s K P / p) p with p = 1 - (1 - e^{-s})^K.
double cdtdma_onoff_objective(int users, double power, double s);
/// ln(1 + K P / sum_l Pr[F = l] / s_l) (1 - (1 - e^{-s_1})^K).
double multilevel_objective(int users, double power, std::span<const double> thresholds);
/// Rate implied by the power constraint for multilevel thresholds.
double multilevel_rate(int users, double power, std::span<const double> thresholds);
/// E[R]/E[T] of the two-user Aloha-type chain at threshold s.
double cdtdma_alo_objective(double power, double s);

/// Optimized single-user throughput max_s e^{-s} ln(1 + s P).
double eta_single(double power, const OptimizerConfig& config = {});
/// Optimized symmetric two-user joint decoding throughput.
double eta_joint(double power, const OptimizerConfig& config = {});

/// Outage-region probabilities of two-user joint decoding.
struct JointRegionProbs {
  double both = 0.0;       ///< P11
  double first_only = 0.0; ///< P10
  double second_only = 0.0;///< P01
  std::int64_t samples = 0;
};

class Rng;

/// Monte Carlo estimate of (P11, P10, P01) over iid unit exponential gains.
JointRegionProbs joint_outage_probs(double rate1, double rate2, double power1, double power2,
                                    std::int64_t samples, Rng& rng);

/// Default threshold search domain for every 1-D policy objective.
inline constexpr double kThresholdLow = 1e-6;
inline constexpr double kThresholdHigh = 60.0;

ThroughputPoint static_tdma(int users, double power, const OptimizerConfig& config = {});
ThroughputPoint joint_decoding_sym(double power, const OptimizerConfig& config = {});
ThroughputPoint joint_plus_tdma(double power, const OptimizerConfig& config = {});
ThroughputPoint cdtdma_on(int users, double power, const OptimizerConfig& config = {});
ThroughputPoint cdtdma_onoff(int users, double power, const OptimizerConfig& config = {});
ThroughputPoint multilevel_cdtdma(int users, double power, int levels,
                                  const OptimizerConfig& config = {});
ThroughputPoint cdtdma_alo(double power, const OptimizerConfig& config = {});

/// Monte Carlo cross-check of the joint decoding closed form at threshold s:
/// R (P10 + P01 + 2 P11) with R = ln(1 + P s).
struct JointCrossCheck {
  double closed_form = 0.0;
  double monte_carlo = 0.0;
  double halfwidth = 0.0;  ///< 3 sigma
  double relative_gap = 0.0;
};
JointCrossCheck joint_decoding_crosscheck(double power, double s, std::int64_t samples,
                                          std::uint64_t seed);

/// cdTDMA + incremental redundancy: single-user INR throughput with power
/// K * P over the max-of-K fading distribution.
ThroughputPoint cdtdma_inr(int users, int attempts, int levels, double power,
                           const InrOptions& options = {});

}  // namespace harqmac
