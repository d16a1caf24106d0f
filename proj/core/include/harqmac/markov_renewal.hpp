#pragma once

#include <string>
#include <vector>

namespace harqmac {

using Matrix = std::vector<std::vector<double>>;

/// Finite-state machine of a repetition protocol.
///
/// transition[i][j] is the one-slot probability of moving i -> j; reward and
/// power hold the expected decoded rate (nats) and expected total transmit
/// power on that transition, conditioned on the transition being taken.
struct FsmModel {
  std::vector<std::string> states;
  Matrix transition;
  Matrix reward;
  Matrix power;
  std::size_t renewal_state = 0;
  int users = 1;

  /// Square, row-stochastic within 1e-12, non-negative rewards and powers.
  void validate() const;
};

/// Stationary law and renewal-reward summaries of an FsmModel.
struct FsmAnalysis {
  std::vector<double> stationary;
  double mean_cycle_length = 0.0;  ///< E[T] = 1 / pi_renewal
  double reward_per_cycle = 0.0;   ///< E[R]
  double power_per_cycle = 0.0;    ///< E[P] summed over users
  double throughput = 0.0;         ///< E[R] / E[T]
  double power_per_user = 0.0;     ///< E[P] / (E[T] K)
};

/// Solves pi T = pi, sum pi = 1 by dense LU. The chain must have a single
/// closed class (transient states get probability 0) and that class must be
/// aperiodic; otherwise ModelError. Residual max|pi T - pi| <= 1e-12.
std::vector<double> stationary_distribution(const FsmModel& fsm);

FsmAnalysis analyze(const FsmModel& fsm);

/// Renewal quantities of cdTDMA with Aloha-type retransmission, K = M = 2,
/// as functions of the per-slot scheduling probability p and the rate R.
struct AloRenewal {
  double mean_cycle_length = 0.0;    ///< 4 - p
  double reward_per_cycle = 0.0;     ///< R p (4 - p)
  double reward_right_branch = 0.0;  ///< R p (1 - p), cycles entering (2,2)
  double reward_left_branch = 0.0;   ///< 3 p R
};

AloRenewal alo_renewal_quantities(double p, double rate);

/// Left-branch reward of the ALO time evolution summed term by term over the
/// cycle length tau = 2, 3, ... until the terms drop below 1e-18 of the
/// running sum. Throws DomainError for p outside (0, 1].
double alo_left_branch_series(double p, double rate);

/// 4-state chain (1,1), (1,2), (2,1), (2,2) of attempt indices for K = M = 2.
/// Every slot the receiver schedules the stronger user if its gain exceeds s
/// (probability p = 1 - (1 - e^{-s})^2, split evenly); the scheduled user
/// decodes at rate R = ln(1 + 2 P s / p) with power 2 P / p and restarts, the
/// other user advances its attempt index or drops its packet after attempt 2.
FsmModel build_alo_fsm(double threshold, double per_user_power);

}  // namespace harqmac
