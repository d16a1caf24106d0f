#pragma once

#include <cstdint>
#include <vector>

#include "harqmac/optimizer.hpp"
#include "harqmac/sim_report.hpp"

namespace harqmac {

class Rng;

/// What the transmitter does when the power needed to finish decoding exceeds
/// the top level of the current attempt.
enum class InrShortfall {
  Silent,   ///< stay silent; the attempt is spent without transmission
  SendTop,  ///< send at the top level and keep the partial information
};

/// Level set of the single-user incremental-redundancy protocol.
///
/// `power[m]` holds the L ascending power levels usable at attempt m + 1. The
/// receiver computes the exact power q = (e^D - 1)/g that finishes decoding
/// (D = rate minus accumulated information, g the current gain) and feeds back
/// the index of the smallest level >= q. When q exceeds every level the
/// feedback is 0 (silence) or, under SendTop, the top index.
struct InrLevels {
  double rate = 0.0;
  std::vector<std::vector<double>> power;
  InrShortfall early_shortfall = InrShortfall::Silent;  ///< attempts 1..M-1
  InrShortfall final_shortfall = InrShortfall::Silent;  ///< attempt M

  int attempts() const { return static_cast<int>(power.size()); }
  int levels() const { return power.empty() ? 0 : static_cast<int>(power.front().size()); }

  /// Throws ConfigError unless every attempt has the same number of strictly
  /// increasing positive levels and the rate is positive.
  void validate() const;
};

/// Receiver feedback and transmit power for one attempt.
struct InrAction {
  int feedback = 0;  ///< 0 (silent) or a 1-based level index
  double power = 0.0;
};

/// Protocol decision at attempt `attempt` (0-based) with deficit `deficit` > 0
/// and gain `gain`.
InrAction inr_decide(const InrLevels& levels, int attempt, double deficit, double gain);

/// True when accumulated information `info` decodes a packet of rate `rate`.
bool inr_decoded(double info, double rate);

/// Distribution of the scheduled user's gain: the max of `users` iid unit
/// exponential gains (users = 1 is plain Rayleigh fading).
struct GainDistribution {
  int users = 1;

  double cdf(double x) const;
  double ccdf(double x) const;
  double quantile(double u) const;
  double sample(Rng& rng) const;
};

/// Long-run throughput and power of a level set, per slot of the user's clock.
struct InrEvaluation {
  double throughput = 0.0;
  double power = 0.0;
};

/// Deterministic semi-analytic evaluation: attempts 1..M-1 use `samples`
/// stratified gains (common across calls for the same seed), the last attempt
/// is integrated exactly through the gain cdf.
InrEvaluation inr_evaluate(const InrLevels& levels, const GainDistribution& gains,
                           std::int64_t samples, std::uint64_t seed);

struct InrOptions {
  std::int64_t sim_budget = 100'000;    ///< samples per objective evaluation
  std::int64_t eval_slots = 1'000'000;  ///< slots of the final simulation
  std::uint64_t seed = 1;
  InrShortfall early_shortfall = InrShortfall::Silent;
  InrShortfall final_shortfall = InrShortfall::Silent;
  OptimizerConfig optimizer{400, 1e-7, 3, 800};
  std::vector<InrLevels> seeds;  ///< extra starting points

  void validate() const;
};

/// Maximizes throughput over the rate and the level sets subject to
/// power per slot <= `power`. Infeasible optima are pulled back onto the
/// constraint by scaling the levels.
InrLevels optimize_inr_levels(int attempts, int levels, double power,
                              const GainDistribution& gains, const InrOptions& options = {});

/// Slot-level simulation of the single-user protocol. The feedback histogram
/// has L + 1 bins; state occupancy is the fraction of slots per attempt index.
SimReport inr_single_user(const InrLevels& levels, const GainDistribution& gains,
                          std::int64_t slots, std::uint64_t seed);

}  // namespace harqmac
