#include "harqmac/inr.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"
#include "harqmac/renewal_estimator.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac {
namespace {

constexpr double kDecodeTolerance = 1e-12;
constexpr double kPenalty = 30.0;
constexpr double kLogClamp = 40.0;

// Precomputed common random numbers for the attempts before the last one.
class Evaluator {
 public:
  Evaluator(int attempts, InrShortfall early, const GainDistribution& gains, std::int64_t samples,
            std::uint64_t seed)
      : gains_(gains) {
    if (samples < 1) throw ConfigError("INR evaluation needs at least one sample");
    // Silent shortfalls leave undecoded packets without information, so
    // every attempt starts from deficit R and the chain is exact without samples.
    if (early == InrShortfall::Silent) return;
    const auto n = static_cast<std::size_t>(samples);
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = gains.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    for (int m = 0; m + 1 < attempts; ++m) {
      std::vector<double> column = base;
      if (m > 0) {
        Rng rng(seed, static_cast<std::uint64_t>(m));
        for (std::size_t i = n - 1; i > 0; --i) {
          const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
          std::swap(column[i], column[std::min(j, i)]);
        }
      }
      grid_.push_back(std::move(column));
    }
    samples_ = n;
  }

  InrEvaluation operator()(const InrLevels& levels) const {
    const int last = levels.attempts() - 1;
    const double rate = levels.rate;
    if (last == 0 || levels.early_shortfall == InrShortfall::Silent) return exact(levels);
    double reward = 0.0;
    double energy = 0.0;
    double slots = 0.0;
    for (std::size_t i = 0; i < samples_; ++i) {
      double info = 0.0;
      bool done = false;
      for (int m = 0; m < last; ++m) {
        const double g = grid_[m][i];
        const InrAction act = inr_decide(levels, m, rate - info, g);
        slots += 1.0;
        energy += act.power;
        if (act.power > 0.0) info += std::log1p(g * act.power);
        if (inr_decoded(info, rate)) {
          reward += rate;
          done = true;
          break;
        }
      }
      if (!done) {
        const auto [success, e] = final_attempt(levels, rate - info);
        slots += 1.0;
        energy += e;
        reward += rate * success;
      }
    }
    return {reward / slots, energy / slots};
  }

 private:
  InrEvaluation exact(const InrLevels& levels) const {
    double alive = 1.0;
    double slots = 0.0;
    double energy = 0.0;
    for (int m = 0; m < levels.attempts(); ++m) {
      const auto [success, e] = attempt_from(levels, m, levels.rate);
      slots += alive;
      energy += alive * e;
      alive *= 1.0 - success;
    }
    return {levels.rate * (1.0 - alive) / slots, energy / slots};
  }

  std::pair<double, double> final_attempt(const InrLevels& levels, double deficit) const {
    return attempt_from(levels, levels.attempts() - 1, deficit);
  }

  // Success probability and expected energy of attempt m at deficit D.
  std::pair<double, double> attempt_from(const InrLevels& levels, int m, double deficit) const {
    const std::vector<double>& p = levels.power[static_cast<std::size_t>(m)];
    const bool last = m + 1 == levels.attempts();
    const InrShortfall rule = last ? levels.final_shortfall : levels.early_shortfall;
    const double need = std::expm1(deficit);
    double upper = 1.0;
    double energy = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
      const double lower = gains_.cdf(need / p[l]);
      energy += p[l] * (upper - lower);
      upper = lower;
    }
    if (rule == InrShortfall::SendTop) energy += p.back() * upper;
    return {gains_.ccdf(need / p.back()), energy};
  }

  GainDistribution gains_;
  std::vector<std::vector<double>> grid_;
  std::size_t samples_ = 0;
};

InrLevels unpack(std::span<const double> v, int attempts, int levels, const InrOptions& options) {
  auto ex = [](double x) { return std::exp(std::clamp(x, -kLogClamp, kLogClamp)); };
  InrLevels out;
  out.rate = ex(v[0]);
  out.early_shortfall = options.early_shortfall;
  out.final_shortfall = options.final_shortfall;
  out.power.assign(static_cast<std::size_t>(attempts), {});
  std::size_t k = 1;
  for (auto& set : out.power) {
    double acc = 0.0;
    for (int l = 0; l < levels; ++l) {
      acc += ex(v[k++]);
      set.push_back(acc);
    }
  }
  return out;
}

std::vector<double> pack(const InrLevels& levels) {
  std::vector<double> v{std::log(levels.rate)};
  for (const auto& set : levels.power) {
    double prev = 0.0;
    for (double p : set) {
      v.push_back(std::log(std::max(p - prev, 1e-300)));
      prev = p;
    }
  }
  return v;
}

InrLevels scaled(InrLevels levels, double factor) {
  for (auto& set : levels.power) {
    for (double& p : set) p *= factor;
  }
  return levels;
}

// Largest uniform scaling of the levels that meets the power budget.
InrLevels make_feasible(const InrLevels& levels, double power, const Evaluator& eval) {
  if (eval(levels).power <= power) return levels;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval(scaled(levels, mid)).power <= power) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo <= 0.0) throw ModelError("INR optimizer: no feasible scaling of the level set");
  return scaled(levels, lo);
}

// Single-level on/off optimum of the gain distribution, repeated over attempts.
InrLevels on_off_seed(int attempts, int levels, double power, const GainDistribution& gains,
                      const InrOptions& options) {
  const Maximum1D best = maximize_1d(
      [&](double s) {
        const double p = gains.ccdf(s);
        return p > 0.0 ? p * std::log1p(s * power / p) : 0.0;
      },
      1e-6, 60.0, options.optimizer);
  const double top = power / gains.ccdf(best.argmax);
  InrLevels seed;
  seed.rate = std::log1p(best.argmax * top);
  seed.early_shortfall = options.early_shortfall;
  seed.final_shortfall = options.final_shortfall;
  std::vector<double> set;
  for (int l = 0; l < levels; ++l) set.push_back(top * std::pow(0.6, levels - 1 - l));
  seed.power.assign(static_cast<std::size_t>(attempts), set);
  return seed;
}

}  // namespace

void InrLevels::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("INR rate must be finite and > 0");
  if (power.empty() || power.front().empty()) throw ConfigError("INR needs M >= 1 and L >= 1");
  for (const auto& set : power) {
    if (set.size() != power.front().size()) {
      throw ConfigError("INR level sets must have the same size at every attempt");
    }
    for (std::size_t l = 0; l < set.size(); ++l) {
      if (!(set[l] > 0.0) || !std::isfinite(set[l]) || (l > 0 && !(set[l] > set[l - 1]))) {
        throw ConfigError(
            fmt::format("INR levels must be positive and strictly increasing, got [{}]",
                        fmt::join(set, ", ")));
      }
    }
  }
}

InrAction inr_decide(const InrLevels& levels, int attempt, double deficit, double gain) {
  const std::vector<double>& set = levels.power[static_cast<std::size_t>(attempt)];
  const double need = std::expm1(deficit) / gain;
  const auto it = std::lower_bound(set.begin(), set.end(), need);
  if (it != set.end()) return {static_cast<int>(it - set.begin()) + 1, *it};
  const bool last = attempt + 1 == levels.attempts();
  const InrShortfall rule = last ? levels.final_shortfall : levels.early_shortfall;
  if (rule == InrShortfall::SendTop) return {levels.levels(), set.back()};
  return {0, 0.0};
}

bool inr_decoded(double info, double rate) { return info >= rate * (1.0 - kDecodeTolerance); }

double GainDistribution::cdf(double x) const { return max_fading_cdf(users, x); }
double GainDistribution::ccdf(double x) const { return max_fading_ccdf(users, x); }
double GainDistribution::quantile(double u) const { return max_fading_quantile(users, u); }

double GainDistribution::sample(Rng& rng) const {
  double best = rng.exponential();
  for (int k = 1; k < users; ++k) best = std::max(best, rng.exponential());
  return best;
}

InrEvaluation inr_evaluate(const InrLevels& levels, const GainDistribution& gains,
                           std::int64_t samples, std::uint64_t seed) {
  levels.validate();
  return Evaluator(levels.attempts(), levels.early_shortfall, gains, samples, seed)(levels);
}

void InrOptions::validate() const {
  if (sim_budget < 100'000) throw ConfigError("INR sim_budget must be >= 1e5 samples");
  if (eval_slots < 10'000) throw ConfigError("INR eval_slots must be >= 1e4");
  optimizer.validate();
}

InrLevels optimize_inr_levels(int attempts, int levels, double power,
                              const GainDistribution& gains, const InrOptions& options) {
  if (attempts < 1 || levels < 1) throw ConfigError("INR needs M >= 1 and L >= 1");
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw DomainError(fmt::format("INR power must be finite and > 0, got {}", power));
  }
  if (gains.users < 1) throw ConfigError("gain distribution needs users >= 1");
  options.validate();

  const Evaluator eval(attempts, options.early_shortfall, gains, options.sim_budget, options.seed);
  const double scale = std::log1p(power);
  auto objective = [&](std::span<const double> v) {
    const InrEvaluation e = eval(unpack(v, attempts, levels, options));
    return e.throughput - kPenalty * scale * std::max(0.0, e.power / power - 1.0);
  };

  std::vector<InrLevels> candidates{on_off_seed(attempts, levels, power, gains, options)};
  for (const InrLevels& s : options.seeds) {
    if (s.attempts() != attempts || s.levels() != levels) {
      throw ConfigError("INR seed does not match (M, L)");
    }
    s.validate();
    candidates.push_back(s);
  }
  std::vector<std::vector<double>> starts;
  for (const InrLevels& c : candidates) starts.push_back(pack(c));

  const auto dim = static_cast<std::size_t>(1 + attempts * levels);
  std::vector<double> lower(dim, std::log(0.05 * power));
  std::vector<double> upper(dim, std::log(3.0 * power));
  lower[0] = std::log(0.2 * scale);
  upper[0] = std::log(1.2 * scale + 0.1);
  const MaximumND best = maximize_nd(objective, lower, upper, options.optimizer, starts);
  candidates.push_back(unpack(best.argmax, attempts, levels, options));

  InrLevels winner;
  double winner_value = -1.0;
  for (const InrLevels& c : candidates) {
    InrLevels feasible = make_feasible(c, power, eval);
    const double value = eval(feasible).throughput;
    if (value > winner_value) {
      winner_value = value;
      winner = std::move(feasible);
    }
  }
  return winner;
}

SimReport inr_single_user(const InrLevels& levels, const GainDistribution& gains,
                          std::int64_t slots, std::uint64_t seed) {
  levels.validate();
  if (slots < 10'000) throw ConfigError("simulation needs at least 1e4 slots");
  const int attempts = levels.attempts();
  SimReport report;
  report.feedback_histogram.assign(static_cast<std::size_t>(levels.levels() + 1), 0);
  std::vector<std::int64_t> occupancy(static_cast<std::size_t>(attempts), 0);
  RenewalEstimator estimator(default_batch_cycles(slots), 1);
  Rng rng(seed);

  int attempt = 0;
  double info = 0.0;
  for (std::int64_t t = 0; t < slots; ++t) {
    const double g = gains.sample(rng);
    const double deficit = levels.rate - info;
    if (!(deficit > 0.0)) throw ModelError("INR: transmission attempted with no deficit");
    const InrAction act = inr_decide(levels, attempt, deficit, g);
    ++report.feedback_histogram[static_cast<std::size_t>(act.feedback)];
    ++occupancy[static_cast<std::size_t>(attempt)];
    if (act.power > 0.0) info += std::log1p(g * act.power);
    const bool decoded = inr_decoded(info, levels.rate);
    estimator.add_slot(decoded ? levels.rate : 0.0, act.power);
    if (decoded || attempt + 1 == attempts) {
      estimator.mark_renewal();
      attempt = 0;
      info = 0.0;
    } else {
      ++attempt;
    }
  }
  fill_report(estimator, slots, report);
  for (std::int64_t n : occupancy) {
    report.state_occupancy.push_back(static_cast<double>(n) / static_cast<double>(slots));
  }
  return report;
}

}  // namespace harqmac
