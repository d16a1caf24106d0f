#include "harqmac/policies.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "harqmac/capacity.hpp"
#include "harqmac/error.hpp"
#include "harqmac/markov_renewal.hpp"
#include "harqmac/random.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac {
namespace {

void require_users(int users) {
  if (users < 1) throw ConfigError("users must be >= 1");
}

void require_power(double power) {
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw DomainError(fmt::format("average power must be finite and >= 0, got {}", power));
  }
}

double normalized(int users, double power, double throughput) {
  const double benchmark = ewfc_benchmark(users, power);
  return benchmark > 0.0 ? throughput / benchmark : 0.0;
}

ThroughputPoint single_threshold_point(PolicyKind kind, int users, double power,
                                       const Maximum1D& best, double rate) {
  ThroughputPoint point;
  point.avg_power = power;
  point.throughput = best.value;
  point.params.kind = kind;
  point.params.thresholds = {best.argmax};
  point.params.rate = rate;
  point.normalized = normalized(users, power, best.value);
  return point;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::StaticTdma: return "static_tdma";
    case PolicyKind::JointDecoding: return "joint";
    case PolicyKind::JointPlusTdma: return "joint_tdma";
    case PolicyKind::CdTdmaOn: return "cdtdma_on";
    case PolicyKind::CdTdmaOnOff: return "cdtdma_onoff";
    case PolicyKind::MultilevelCdTdma: return "multilevel";
    case PolicyKind::CdTdmaAlo: return "cdtdma_alo";
    case PolicyKind::CdTdmaInr: return "cdtdma_inr";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind kind : kAllPolicies) {
    if (policy_name(kind) == name) return kind;
  }
  throw ConfigError(fmt::format("unknown policy '{}'", name));
}

int implied_feedback_size(PolicyKind kind, int users, int levels) {
  switch (kind) {
    case PolicyKind::StaticTdma:
    case PolicyKind::JointDecoding:
    case PolicyKind::JointPlusTdma: return 1;
    case PolicyKind::CdTdmaOn: return users;
    case PolicyKind::CdTdmaOnOff:
    case PolicyKind::CdTdmaAlo: return users + 1;
    case PolicyKind::MultilevelCdTdma:
    case PolicyKind::CdTdmaInr: return users * levels + 1;
  }
  return 0;
}

void PolicyParams::validate() const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0)) throw ConfigError("thresholds must be >= 0");
    if (kind == PolicyKind::MultilevelCdTdma && i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw ConfigError("multilevel thresholds must be strictly increasing");
    }
  }
  if (!(time_share >= 0.0 && time_share <= 1.0) || !(power_share >= 0.0 && power_share <= 1.0)) {
    throw ConfigError("time and power shares must lie in [0, 1]");
  }
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (attempts < 1) throw ConfigError("attempts must be >= 1");
}

std::string PolicyParams::describe() const {
  std::vector<std::string> parts;
  auto add = [&](std::string_view name, double value) {
    parts.push_back(fmt::format("{}={:.9g}", name, value));
  };
  switch (kind) {
    case PolicyKind::JointPlusTdma:
      add("tau", time_share);
      add("alpha", power_share);
      if (thresholds.size() == 2) {
        add("s_single", thresholds[0]);
        add("s_joint", thresholds[1]);
      }
      break;
    case PolicyKind::MultilevelCdTdma:
      for (std::size_t i = 0; i < thresholds.size(); ++i) add(fmt::format("s{}", i + 1), thresholds[i]);
      break;
    case PolicyKind::CdTdmaInr:
      for (std::size_t m = 0; m < inr.power.size(); ++m) {
        for (std::size_t l = 0; l < inr.power[m].size(); ++l) {
          add(fmt::format("P{}_{}", m + 1, l + 1), inr.power[m][l]);
        }
      }
      if (inr.early_shortfall == InrShortfall::SendTop) add("early_send_top", 1.0);
      if (inr.final_shortfall == InrShortfall::SendTop) add("final_send_top", 1.0);
      break;
    default:
      if (!thresholds.empty()) add("s", thresholds[0]);
      break;
  }
  if (kind != PolicyKind::JointPlusTdma) add("R", kind == PolicyKind::CdTdmaInr ? inr.rate : rate);
  return fmt::format("{}", fmt::join(parts, ";"));
}

double single_user_objective(double power, double s) {
  if (power == 0.0) return 0.0;
  return std::exp(-s) * std::log1p(s * power);
}

double static_tdma_objective(int users, double power, double s) {
  return single_user_objective(users * power, s);
}

double joint_decoding_objective(double power, double s) {
  if (power == 0.0) return 0.0;
  const double ps1 = power * s + 1.0;
  const double tail = std::exp(-s * ps1);
  // P10 + P11 for one user; the factor 2 accounts for both users.
  const double success = std::exp(-s) * (-std::expm1(-s * ps1) / ps1 + tail * (power * s * s + 1.0));
  return 2.0 * success * std::log1p(power * s);
}

double cdtdma_on_objective(int users, double power, double s) {
  if (power == 0.0) return 0.0;
  return std::log1p(s * users * power) * max_fading_ccdf(users, s);
}

double cdtdma_onoff_objective(int users, double power, double s) {
  if (power == 0.0) return 0.0;
  const double p = max_fading_ccdf(users, s);
  if (p == 0.0) return 0.0;
  return std::log1p(s * users * power / p) * p;
}

double multilevel_rate(int users, double power, std::span<const double> thresholds) {
  if (thresholds.empty()) throw ConfigError("multilevel: at least one threshold required");
  double weighted = 0.0;  // sum_l Pr[F = l] / s_l
  for (std::size_t l = 0; l < thresholds.size(); ++l) {
    const double upper = l + 1 < thresholds.size() ? max_fading_ccdf(users, thresholds[l + 1]) : 0.0;
    weighted += (max_fading_ccdf(users, thresholds[l]) - upper) / thresholds[l];
  }
  if (weighted <= 0.0) return 0.0;
  return std::log1p(users * power / weighted);
}

double multilevel_objective(int users, double power, std::span<const double> thresholds) {
  if (power == 0.0) return 0.0;
  return multilevel_rate(users, power, thresholds) * max_fading_ccdf(users, thresholds.front());
}

double cdtdma_alo_objective(double power, double s) {
  if (power == 0.0) return 0.0;
  constexpr int kUsers = 2;
  const double p = max_fading_ccdf(kUsers, s);
  if (p == 0.0) return 0.0;
  const double rate = std::log1p(kUsers * power * s / p);
  const AloRenewal renewal = alo_renewal_quantities(p, rate);
  return renewal.reward_per_cycle / renewal.mean_cycle_length;
}

double eta_single(double power, const OptimizerConfig& config) {
  if (power == 0.0) return 0.0;
  return maximize_1d([&](double s) { return single_user_objective(power, s); }, kThresholdLow,
                     kThresholdHigh, config)
      .value;
}

double eta_joint(double power, const OptimizerConfig& config) {
  if (power == 0.0) return 0.0;
  return maximize_1d([&](double s) { return joint_decoding_objective(power, s); }, kThresholdLow,
                     kThresholdHigh, config)
      .value;
}

double joint_plus_tdma_objective(double power, double time_share, double power_share,
                                 const OptimizerConfig& config) {
  const double tau = std::clamp(time_share, 0.0, 1.0);
  const double alpha = std::clamp(power_share, 0.0, 1.0);
  double total = 0.0;
  if (tau > 0.0) total += tau * eta_single(2.0 * alpha * power / tau, config);
  if (tau < 1.0) total += (1.0 - tau) * eta_joint((1.0 - alpha) * power / (1.0 - tau), config);
  return total;
}

JointRegionProbs joint_outage_probs(double rate1, double rate2, double power1, double power2,
                                    std::int64_t samples, Rng& rng) {
  if (samples <= 0) throw ConfigError("joint_outage_probs: samples must be > 0");
  if (!(rate1 >= 0.0) || !(rate2 >= 0.0) || !(power1 >= 0.0) || !(power2 >= 0.0)) {
    throw DomainError("joint_outage_probs: rates and powers must be non-negative");
  }
  std::int64_t both = 0;
  std::int64_t first = 0;
  std::int64_t second = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double a = rng.exponential() * power1;
    const double b = rng.exponential() * power2;
    const bool single1 = rate1 <= std::log1p(a);
    const bool single2 = rate2 <= std::log1p(b);
    if (single1 && single2 && rate1 + rate2 <= std::log1p(a + b)) {
      ++both;
    } else if (rate1 <= std::log1p(a / (1.0 + b)) && !single2) {
      ++first;
    } else if (rate2 <= std::log1p(b / (1.0 + a)) && !single1) {
      ++second;
    }
  }
  const auto n = static_cast<double>(samples);
  return {both / n, first / n, second / n, samples};
}

ThroughputPoint static_tdma(int users, double power, const OptimizerConfig& config) {
  require_users(users);
  require_power(power);
  const double total = users * power;
  if (power == 0.0) return single_threshold_point(PolicyKind::StaticTdma, users, power, {0.0, 0.0}, 0.0);
  const Maximum1D best = maximize_1d([&](double s) { return single_user_objective(total, s); },
                                     kThresholdLow, kThresholdHigh, config);
  return single_threshold_point(PolicyKind::StaticTdma, users, power, best,
                                std::log1p(best.argmax * total));
}

ThroughputPoint joint_decoding_sym(double power, const OptimizerConfig& config) {
  require_power(power);
  constexpr int kUsers = 2;
  if (power == 0.0) return single_threshold_point(PolicyKind::JointDecoding, kUsers, power, {0.0, 0.0}, 0.0);
  const Maximum1D best = maximize_1d([&](double s) { return joint_decoding_objective(power, s); },
                                     kThresholdLow, kThresholdHigh, config);
  return single_threshold_point(PolicyKind::JointDecoding, kUsers, power, best,
                                std::log1p(power * best.argmax));
}

JointCrossCheck joint_decoding_crosscheck(double power, double s, std::int64_t samples,
                                          std::uint64_t seed) {
  const double rate = std::log1p(power * s);
  Rng rng(seed, 0x6a6f696e74ULL);
  // Per-sample reward R (1{P10} + 1{P01} + 2 1{P11}); variance from the multinomial counts.
  const JointRegionProbs probs = joint_outage_probs(rate, rate, power, power, samples, rng);
  JointCrossCheck out;
  out.closed_form = joint_decoding_objective(power, s);
  const double single = probs.first_only + probs.second_only;
  out.monte_carlo = rate * (single + 2.0 * probs.both);
  const double second_moment = rate * rate * (single + 4.0 * probs.both);
  const double variance = second_moment - out.monte_carlo * out.monte_carlo;
  out.halfwidth = 3.0 * std::sqrt(std::max(variance, 0.0) / static_cast<double>(samples));
  out.relative_gap = out.closed_form > 0.0
                         ? std::abs(out.monte_carlo - out.closed_form) / out.closed_form
                         : 0.0;
  return out;
}

ThroughputPoint joint_plus_tdma(double power, const OptimizerConfig& config) {
  require_power(power);
  constexpr int kUsers = 2;
  ThroughputPoint point;
  point.avg_power = power;
  point.params.kind = PolicyKind::JointPlusTdma;
  if (power == 0.0) return point;

  auto objective = [&](std::span<const double> v) {
    return joint_plus_tdma_objective(power, v[0], v[1], config);
  };
  // Pure static TDMA (tau = alpha = 1) and pure joint decoding (0, 0) seed the search.
  const std::vector<std::vector<double>> corners{{1.0, 1.0}, {0.0, 0.0}};
  const std::vector<double> lower{0.0, 0.0};
  const std::vector<double> upper{1.0, 1.0};
  OptimizerConfig outer = config;
  outer.nd_restarts = std::min(config.nd_restarts, 4);
  outer.refine_tol = std::max(config.refine_tol, 1e-7);
  const MaximumND best = maximize_nd(objective, lower, upper, outer, corners);

  const double tau = std::clamp(best.argmax[0], 0.0, 1.0);
  const double alpha = std::clamp(best.argmax[1], 0.0, 1.0);
  point.throughput = best.value;
  point.params.time_share = tau;
  point.params.power_share = alpha;

  const double single_power = tau > 0.0 ? 2.0 * alpha * power / tau : 0.0;
  const double joint_power = tau < 1.0 ? (1.0 - alpha) * power / (1.0 - tau) : 0.0;
  const double s_single =
      single_power > 0.0
          ? maximize_1d([&](double s) { return single_user_objective(single_power, s); },
                        kThresholdLow, kThresholdHigh, config).argmax
          : 0.0;
  const double s_joint =
      joint_power > 0.0
          ? maximize_1d([&](double s) { return joint_decoding_objective(joint_power, s); },
                        kThresholdLow, kThresholdHigh, config).argmax
          : 0.0;
  point.params.thresholds = {s_single, s_joint};
  point.params.rate = std::log1p(s_single * single_power);
  point.normalized = normalized(kUsers, power, point.throughput);
  return point;
}

ThroughputPoint cdtdma_on(int users, double power, const OptimizerConfig& config) {
  require_users(users);
  require_power(power);
  if (power == 0.0) return single_threshold_point(PolicyKind::CdTdmaOn, users, power, {0.0, 0.0}, 0.0);
  const Maximum1D best = maximize_1d([&](double s) { return cdtdma_on_objective(users, power, s); },
                                     kThresholdLow, kThresholdHigh, config);
  return single_threshold_point(PolicyKind::CdTdmaOn, users, power, best,
                                std::log1p(best.argmax * users * power));
}

ThroughputPoint cdtdma_onoff(int users, double power, const OptimizerConfig& config) {
  require_users(users);
  require_power(power);
  if (power == 0.0) return single_threshold_point(PolicyKind::CdTdmaOnOff, users, power, {0.0, 0.0}, 0.0);
  const Maximum1D best = maximize_1d(
      [&](double s) { return cdtdma_onoff_objective(users, power, s); }, kThresholdLow,
      kThresholdHigh, config);
  const double p = max_fading_ccdf(users, best.argmax);
  return single_threshold_point(PolicyKind::CdTdmaOnOff, users, power, best,
                                std::log1p(best.argmax * users * power / p));
}

ThroughputPoint multilevel_cdtdma(int users, double power, int levels, const OptimizerConfig& config) {
  require_users(users);
  require_power(power);
  if (levels < 1) throw ConfigError("multilevel_cdtdma: levels must be >= 1");

  if (levels == 1) {
    ThroughputPoint point = cdtdma_onoff(users, power, config);
    point.params.kind = PolicyKind::MultilevelCdTdma;
    point.params.levels = 1;
    return point;
  }

  // Coarser solution seeds the search with the extra level parked far out,
  // where its bin has negligible probability, so the optimum never drops in L.
  const ThroughputPoint coarser = multilevel_cdtdma(users, power, levels - 1, config);
  ThroughputPoint point;
  point.avg_power = power;
  point.params.kind = PolicyKind::MultilevelCdTdma;
  point.params.levels = levels;
  if (power == 0.0) {
    point.params.thresholds.assign(static_cast<std::size_t>(levels), 0.0);
    return point;
  }

  // s_1 = e^{u_1}, s_{l+1} = s_l + e^{u_{l+1}} keeps the ordering without constraints.
  const auto n = static_cast<std::size_t>(levels);
  auto decode = [n](std::span<const double> u) {
    std::vector<double> s(n);
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      acc += std::exp(std::clamp(u[l], -30.0, 6.0));
      s[l] = acc;
    }
    return s;
  };
  auto objective = [&](std::span<const double> u) {
    const std::vector<double> s = decode(u);
    return multilevel_objective(users, power, s);
  };

  std::vector<double> seed(n);
  double previous = 0.0;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    seed[l] = std::log(coarser.params.thresholds[l] - previous);
    previous = coarser.params.thresholds[l];
  }
  seed[n - 1] = 5.5;
  const std::vector<std::vector<double>> starts{seed};
  const std::vector<double> lower(n, -4.0);
  const std::vector<double> upper(n, 1.5);
  OptimizerConfig nd = config;
  nd.refine_tol = std::max(config.refine_tol, 1e-8);
  const MaximumND best = maximize_nd(objective, lower, upper, nd, starts);

  point.params.thresholds = decode(best.argmax);
  point.throughput = best.value;
  if (coarser.throughput > point.throughput) {
    point.throughput = coarser.throughput;
    point.params.thresholds = decode(seed);
  }
  point.params.rate = multilevel_rate(users, power, point.params.thresholds);
  point.normalized = normalized(users, power, point.throughput);
  return point;
}

ThroughputPoint cdtdma_alo(double power, const OptimizerConfig& config) {
  require_power(power);
  constexpr int kUsers = 2;
  if (power == 0.0) {
    ThroughputPoint point = single_threshold_point(PolicyKind::CdTdmaAlo, kUsers, power, {0.0, 0.0}, 0.0);
    point.params.attempts = 2;
    return point;
  }
  const Maximum1D best = maximize_1d([&](double s) { return cdtdma_alo_objective(power, s); },
                                     kThresholdLow, kThresholdHigh, config);
  const double p = max_fading_ccdf(kUsers, best.argmax);
  ThroughputPoint point = single_threshold_point(PolicyKind::CdTdmaAlo, kUsers, power, best,
                                                 std::log1p(kUsers * power * best.argmax / p));
  point.params.attempts = 2;
  return point;
}

ThroughputPoint cdtdma_inr(int users, int attempts, int levels, double power,
                           const InrOptions& options) {
  require_users(users);
  require_power(power);
  if (attempts < 1 || levels < 1) throw ConfigError("cdtdma_inr: M and L must be >= 1");
  ThroughputPoint point;
  point.avg_power = power;
  point.params.kind = PolicyKind::CdTdmaInr;
  point.params.levels = levels;
  point.params.attempts = attempts;
  if (power == 0.0) return point;

  // The user active in a slot is the strongest one and sees max-of-K fading
  // with the whole K * P budget on its own clock.
  const GainDistribution gains{users};
  const double budget = users * power;
  InrOptions opts = options;
  const ThroughputPoint ml = multilevel_cdtdma(users, power, levels, options.optimizer);
  if (ml.params.rate > 0.0) {
    InrLevels seed;
    seed.rate = ml.params.rate;
    seed.early_shortfall = options.early_shortfall;
    seed.final_shortfall = options.final_shortfall;
    std::vector<double> set;
    for (auto it = ml.params.thresholds.rbegin(); it != ml.params.thresholds.rend(); ++it) {
      set.push_back(std::expm1(seed.rate) / *it);
    }
    seed.power.assign(static_cast<std::size_t>(attempts), set);
    opts.seeds.push_back(std::move(seed));
  }
  const InrLevels best = optimize_inr_levels(attempts, levels, budget, gains, opts);
  const SimReport report = inr_single_user(best, gains, options.eval_slots, options.seed);

  point.throughput = report.throughput_est;
  point.uncertainty = report.ci_halfwidth_throughput;
  point.params.inr = best;
  point.params.rate = best.rate;
  point.normalized = normalized(users, power, point.throughput);
  return point;
}

}  // namespace harqmac
