#pragma once

#include <cstdint>

#include "harqmac/policies.hpp"
#include "harqmac/sim_report.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac {

/// K-user block-fading MAC with unit-variance noise.
struct SystemSpec {
  int users = 2;             ///< K
  int max_attempts = 1;      ///< M, including the first transmission
  int feedback_size = 1;     ///< F, symbols per slot on the broadcast feedback channel
  double avg_power = 1.0;    ///< per-user long-term budget (= average SNR)
  FadingModel fading;

  void validate() const;
};

/// Spec with M and F implied by the policy; M is params.attempts for ALO and
/// INR and 1 otherwise.
SystemSpec make_system_spec(const PolicyParams& params, int users, double avg_power);

/// Throws ConfigError when params do not fit spec (policy-implied F, K = 2
/// only policies, M > 1 on a single-shot policy, missing thresholds).
void check_consistency(const SystemSpec& spec, const PolicyParams& params);

inline constexpr std::int64_t kMinSimulationSlots = 10'000;

/// Slot-level Monte Carlo run of a policy.
///
/// Each slot: draw all gains, let the receiver compute the feedback symbol
/// from gains and decoder states, let transmitters map (feedback, own state)
/// to power, decode with the mutual-information rule, and accumulate reward
/// and energy. Renewals are slots after which every user starts a fresh
/// packet. Deterministic for a fixed seed.
SimReport simulate(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                   std::uint64_t seed);

}  // namespace harqmac
