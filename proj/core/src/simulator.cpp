#include "harqmac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "harqmac/error.hpp"
#include "harqmac/inr.hpp"
#include "harqmac/random.hpp"
#include "harqmac/renewal_estimator.hpp"

namespace harqmac {
namespace {

constexpr double kDecodeTolerance = 1e-12;

bool decodes(double mutual_information, double rate) {
  return mutual_information >= rate * (1.0 - kDecodeTolerance);
}

// Lowest index among the strongest users.
int strongest(const std::vector<double>& gains) {
  return static_cast<int>(std::max_element(gains.begin(), gains.end()) - gains.begin());
}

// Number of users decoded when every user sends rate `rate` with received
// SNRs `snr`. The decoder tries the n strongest users for n = K..1, treating
// the rest as noise; the largest jointly decodable n wins.
int joint_decoded_count(std::vector<double> snr, double rate) {
  std::sort(snr.begin(), snr.end(), std::greater<>());
  const int users = static_cast<int>(snr.size());
  for (int n = users; n >= 1; --n) {
    double noise = 1.0;
    for (int k = n; k < users; ++k) noise += snr[k];
    bool ok = true;
    double weakest_sum = 0.0;
    for (int m = 1; m <= n && ok; ++m) {
      weakest_sum += snr[n - m];
      ok = decodes(std::log1p(weakest_sum / noise), m * rate);
    }
    if (ok) return n;
  }
  return 0;
}

class Run {
 public:
  Run(const SystemSpec& spec, std::int64_t slots, std::uint64_t seed)
      : spec_(spec),
        slots_(slots),
        rng_(seed),
        gains_(static_cast<std::size_t>(spec.users)),
        power_(static_cast<std::size_t>(spec.users)),
        estimator_(default_batch_cycles(slots), spec.users) {
    report_.feedback_histogram.assign(static_cast<std::size_t>(spec.feedback_size), 0);
  }

  // Draws the gains of slot t and clears the power vector.
  void begin_slot() {
    sample_fading_into(spec_.fading, gains_, rng_);
    std::fill(power_.begin(), power_.end(), 0.0);
  }

  void end_slot(int feedback, double reward, bool renewal) {
    ++report_.feedback_histogram[static_cast<std::size_t>(feedback)];
    estimator_.add_slot(reward, power_);
    if (renewal) estimator_.mark_renewal();
  }

  SimReport finish() {
    fill_report(estimator_, slots_, report_);
    return std::move(report_);
  }

  const std::vector<double>& gains() const { return gains_; }
  std::vector<double>& power() { return power_; }
  std::vector<double>& occupancy() { return report_.state_occupancy; }

 private:
  const SystemSpec& spec_;
  std::int64_t slots_;
  Rng rng_;
  std::vector<double> gains_;
  std::vector<double> power_;
  RenewalEstimator estimator_;
  SimReport report_;
};

SimReport run_static_tdma(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                          std::uint64_t seed) {
  Run run(spec, slots, seed);
  const int users = spec.users;
  const double on = users * spec.avg_power;
  const double rate = std::log1p(params.thresholds[0] * on);
  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    const auto u = static_cast<std::size_t>(t % users);
    run.power()[u] = on;
    const bool ok = decodes(std::log1p(run.gains()[u] * on), rate);
    run.end_slot(0, ok ? rate : 0.0, u + 1 == static_cast<std::size_t>(users));
  }
  return run.finish();
}

SimReport run_joint(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                    std::uint64_t seed) {
  Run run(spec, slots, seed);
  const double p = spec.avg_power;
  const double rate = std::log1p(p * params.thresholds[0]);
  std::vector<double> snr(static_cast<std::size_t>(spec.users));
  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    for (std::size_t k = 0; k < snr.size(); ++k) {
      run.power()[k] = p;
      snr[k] = run.gains()[k] * p;
    }
    run.end_slot(0, rate * joint_decoded_count(snr, rate), true);
  }
  return run.finish();
}

SimReport run_joint_plus_tdma(const SystemSpec& spec, const PolicyParams& params,
                              std::int64_t slots, std::uint64_t seed) {
  Run run(spec, slots, seed);
  const int users = spec.users;
  const double tau = params.time_share;
  const double alpha = params.power_share;
  const double p_single = tau > 0.0 ? users * alpha * spec.avg_power / tau : 0.0;
  const double p_joint = tau < 1.0 ? (1.0 - alpha) * spec.avg_power / (1.0 - tau) : 0.0;
  const double r_single = std::log1p(params.thresholds[0] * p_single);
  const double r_joint = std::log1p(params.thresholds[1] * p_joint);
  std::vector<double> snr(static_cast<std::size_t>(users));
  std::int64_t tdma_slots = 0;
  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    // A fraction tau of the slots, spread evenly, runs single-user TDMA.
    const bool tdma = std::floor(static_cast<double>(t + 1) * tau) >
                      std::floor(static_cast<double>(t) * tau);
    double reward = 0.0;
    if (tdma) {
      const auto u = static_cast<std::size_t>(tdma_slots++ % users);
      run.power()[u] = p_single;
      if (decodes(std::log1p(run.gains()[u] * p_single), r_single)) reward = r_single;
    } else {
      for (std::size_t k = 0; k < snr.size(); ++k) {
        run.power()[k] = p_joint;
        snr[k] = run.gains()[k] * p_joint;
      }
      reward = r_joint * joint_decoded_count(snr, r_joint);
    }
    run.end_slot(0, reward, true);
  }
  return run.finish();
}

// cdTDMA-on, on/off and multilevel: the strongest user is scheduled and sent a
// power level chosen from its gain.
SimReport run_threshold_tdma(const SystemSpec& spec, const PolicyParams& params,
                             std::int64_t slots, std::uint64_t seed) {
  Run run(spec, slots, seed);
  const int users = spec.users;
  const double budget = users * spec.avg_power;
  const std::vector<double>& s = params.thresholds;
  const int levels = static_cast<int>(s.size());
  double rate = 0.0;
  std::vector<double> level_power;
  switch (params.kind) {
    case PolicyKind::CdTdmaOn:
      level_power = {budget};
      rate = std::log1p(s[0] * budget);
      break;
    case PolicyKind::CdTdmaOnOff: {
      const double on = budget / max_fading_ccdf(users, s[0]);
      level_power = {on};
      rate = std::log1p(s[0] * on);
      break;
    }
    default:
      rate = multilevel_rate(users, spec.avg_power, s);
      for (double threshold : s) level_power.push_back(std::expm1(rate) / threshold);
      break;
  }
  const bool always_on = params.kind == PolicyKind::CdTdmaOn;

  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    const int u = strongest(run.gains());
    const double g = run.gains()[static_cast<std::size_t>(u)];
    int level = static_cast<int>(std::upper_bound(s.begin(), s.end(), g) - s.begin());
    int feedback = 0;
    double reward = 0.0;
    if (always_on) {
      feedback = u;
      level = 1;
    } else if (level > 0) {
      feedback = 1 + u * levels + (level - 1);
    }
    if (level > 0) {
      const double p = level_power[static_cast<std::size_t>(level - 1)];
      run.power()[static_cast<std::size_t>(u)] = p;
      if (decodes(std::log1p(g * p), rate)) reward = rate;
    }
    run.end_slot(feedback, reward, true);
  }
  return run.finish();
}

// Per-user attempt counters; the scheduled user decodes, every other pending
// user spends an attempt and drops its packet after the M-th.
SimReport run_alo(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                  std::uint64_t seed) {
  Run run(spec, slots, seed);
  const int users = spec.users;
  const int attempts = spec.max_attempts;
  const double s = params.thresholds[0];
  const double on = users * spec.avg_power / max_fading_ccdf(users, s);
  const double rate = std::log1p(s * on);
  std::vector<int> attempt(static_cast<std::size_t>(users), 0);
  std::vector<std::int64_t> occupancy(static_cast<std::size_t>(std::pow(attempts, users)), 0);

  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    std::size_t state = 0;
    for (int a : attempt) state = state * static_cast<std::size_t>(attempts) + static_cast<std::size_t>(a);
    ++occupancy[state];

    const int u = strongest(run.gains());
    const double g = run.gains()[static_cast<std::size_t>(u)];
    int scheduled = -1;
    double reward = 0.0;
    if (g >= s) {
      scheduled = u;
      run.power()[static_cast<std::size_t>(u)] = on;
      if (decodes(std::log1p(g * on), rate)) reward = rate;
    }
    bool fresh = true;
    for (int k = 0; k < users; ++k) {
      int& a = attempt[static_cast<std::size_t>(k)];
      a = (k == scheduled || a + 1 == attempts) ? 0 : a + 1;
      fresh = fresh && a == 0;
    }
    run.end_slot(scheduled + 1, reward, fresh);
  }
  for (std::int64_t n : occupancy) {
    run.occupancy().push_back(static_cast<double>(n) / static_cast<double>(slots));
  }
  return run.finish();
}

// Only the strongest user runs its incremental-redundancy state machine in a
// slot; the others keep their state.
SimReport run_inr(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                  std::uint64_t seed) {
  Run run(spec, slots, seed);
  const InrLevels& levels = params.inr;
  const int users = spec.users;
  const int attempts = levels.attempts();
  const int nlevels = levels.levels();
  std::vector<int> attempt(static_cast<std::size_t>(users), 0);
  std::vector<double> info(static_cast<std::size_t>(users), 0.0);
  std::vector<std::int64_t> occupancy(static_cast<std::size_t>(attempts), 0);
  int pending = 0;  // users with a partially received packet

  for (std::int64_t t = 0; t < slots; ++t) {
    run.begin_slot();
    const int u = strongest(run.gains());
    const auto k = static_cast<std::size_t>(u);
    const double g = run.gains()[k];
    ++occupancy[static_cast<std::size_t>(attempt[k])];
    const double deficit = levels.rate - info[k];
    if (!(deficit > 0.0)) throw ModelError("INR: transmission attempted with no deficit");
    const InrAction act = inr_decide(levels, attempt[k], deficit, g);
    run.power()[k] = act.power;
    if (act.power > 0.0) info[k] += std::log1p(g * act.power);
    const bool ok = inr_decoded(info[k], levels.rate);
    const bool was_fresh = attempt[k] == 0;
    if (ok || attempt[k] + 1 == attempts) {
      attempt[k] = 0;
      info[k] = 0.0;
      if (!was_fresh) --pending;
    } else {
      ++attempt[k];
      if (was_fresh) ++pending;
    }
    const int feedback = act.feedback == 0 ? 0 : 1 + u * nlevels + (act.feedback - 1);
    run.end_slot(feedback, ok ? levels.rate : 0.0, pending == 0);
  }
  for (std::int64_t n : occupancy) {
    run.occupancy().push_back(static_cast<double>(n) / static_cast<double>(slots));
  }
  return run.finish();
}

std::size_t required_thresholds(const PolicyParams& params) {
  switch (params.kind) {
    case PolicyKind::CdTdmaInr: return 0;
    case PolicyKind::JointPlusTdma: return 2;
    case PolicyKind::MultilevelCdTdma: return static_cast<std::size_t>(params.levels);
    default: return 1;
  }
}

}  // namespace

void SystemSpec::validate() const {
  if (users < 1) throw ConfigError("SystemSpec: K must be >= 1");
  if (max_attempts < 1) throw ConfigError("SystemSpec: M must be >= 1");
  if (feedback_size < 1) throw ConfigError("SystemSpec: F must be >= 1");
  if (!(avg_power >= 0.0) || !std::isfinite(avg_power)) {
    throw ConfigError("SystemSpec: average power must be finite and >= 0");
  }
}

SystemSpec make_system_spec(const PolicyParams& params, int users, double avg_power) {
  SystemSpec spec;
  spec.users = users;
  spec.avg_power = avg_power;
  const bool multi_attempt =
      params.kind == PolicyKind::CdTdmaAlo || params.kind == PolicyKind::CdTdmaInr;
  spec.max_attempts = multi_attempt ? params.attempts : 1;
  spec.feedback_size = implied_feedback_size(params.kind, users, params.levels);
  return spec;
}

void check_consistency(const SystemSpec& spec, const PolicyParams& params) {
  spec.validate();
  params.validate();
  const int implied = implied_feedback_size(params.kind, spec.users, params.levels);
  if (implied != spec.feedback_size) {
    throw ConfigError(fmt::format("policy {} needs F = {} for K = {}, L = {}; spec has F = {}",
                                  policy_name(params.kind), implied, spec.users, params.levels,
                                  spec.feedback_size));
  }
  const bool multi_attempt =
      params.kind == PolicyKind::CdTdmaAlo || params.kind == PolicyKind::CdTdmaInr;
  if (!multi_attempt && spec.max_attempts != 1) {
    throw ConfigError(fmt::format("policy {} is single-shot; M must be 1",
                                  policy_name(params.kind)));
  }
  if (params.kind == PolicyKind::JointPlusTdma && spec.users != 2) {
    throw ConfigError("joint_tdma is defined for K = 2");
  }
  if (params.thresholds.size() != required_thresholds(params)) {
    throw ConfigError(fmt::format("policy {} needs {} threshold(s), got {}",
                                  policy_name(params.kind), required_thresholds(params),
                                  params.thresholds.size()));
  }
  if (params.kind == PolicyKind::MultilevelCdTdma || params.kind == PolicyKind::CdTdmaOnOff ||
      params.kind == PolicyKind::CdTdmaAlo) {
    if (!(params.thresholds.front() > 0.0)) {
      throw ConfigError(fmt::format("policy {} needs thresholds > 0", policy_name(params.kind)));
    }
  }
  if (params.kind == PolicyKind::CdTdmaInr) {
    params.inr.validate();
    if (params.inr.attempts() != spec.max_attempts || params.inr.levels() != params.levels) {
      throw ConfigError("cdtdma_inr level sets do not match (M, L)");
    }
  }
}

SimReport simulate(const SystemSpec& spec, const PolicyParams& params, std::int64_t slots,
                   std::uint64_t seed) {
  check_consistency(spec, params);
  if (slots < kMinSimulationSlots) {
    throw ConfigError(fmt::format("simulate: slots must be >= {}, got {}", kMinSimulationSlots, slots));
  }
  switch (params.kind) {
    case PolicyKind::StaticTdma: return run_static_tdma(spec, params, slots, seed);
    case PolicyKind::JointDecoding: return run_joint(spec, params, slots, seed);
    case PolicyKind::JointPlusTdma: return run_joint_plus_tdma(spec, params, slots, seed);
    case PolicyKind::CdTdmaOn:
    case PolicyKind::CdTdmaOnOff:
    case PolicyKind::MultilevelCdTdma: return run_threshold_tdma(spec, params, slots, seed);
    case PolicyKind::CdTdmaAlo: return run_alo(spec, params, slots, seed);
    case PolicyKind::CdTdmaInr: return run_inr(spec, params, slots, seed);
  }
  throw ConfigError("simulate: unknown policy");
}

}  // namespace harqmac
