#include "harqmac_app/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <ostream>
#include <thread>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"
#include "harqmac/simulator.hpp"

namespace harqmac::app {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

bool needs_two_users(PolicyKind kind) {
  return kind == PolicyKind::JointDecoding || kind == PolicyKind::JointPlusTdma ||
         kind == PolicyKind::CdTdmaAlo;
}

std::string number(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

void PolicySetup::validate() const {
  const std::string_view name = policy_name(kind);
  if (users < 1) throw ConfigError("K must be >= 1");
  if (attempts < 1 || levels < 1) throw ConfigError("M and L must be >= 1");
  if (needs_two_users(kind) && users != 2) {
    throw ConfigError(fmt::format("{} has a closed form for K = 2 only, got K = {}", name, users));
  }
  if (kind == PolicyKind::CdTdmaAlo && attempts != 2) {
    throw ConfigError(fmt::format("cdtdma_alo is analyzed for M = 2 only, got M = {}", attempts));
  }
  if (kind != PolicyKind::CdTdmaAlo && kind != PolicyKind::CdTdmaInr && attempts != 1) {
    throw ConfigError(fmt::format("{} is single-shot: M must be 1 (implied F = {})", name,
                                  implied_feedback_size(kind, users, levels)));
  }
  if (kind != PolicyKind::MultilevelCdTdma && kind != PolicyKind::CdTdmaInr && levels != 1) {
    throw ConfigError(fmt::format("{} has a single power level: L must be 1 (implied F = {})", name,
                                  implied_feedback_size(kind, users, 1)));
  }
}

int PolicySetup::feedback_size() const { return implied_feedback_size(kind, users, levels); }

double snr_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

ThroughputPoint optimize_policy(const PolicySetup& setup, double pbar, const EvalOptions& options) {
  setup.validate();
  switch (setup.kind) {
    case PolicyKind::StaticTdma: return static_tdma(setup.users, pbar);
    case PolicyKind::JointDecoding: return joint_decoding_sym(pbar);
    case PolicyKind::JointPlusTdma: return joint_plus_tdma(pbar);
    case PolicyKind::CdTdmaOn: return cdtdma_on(setup.users, pbar);
    case PolicyKind::CdTdmaOnOff: return cdtdma_onoff(setup.users, pbar);
    case PolicyKind::MultilevelCdTdma: return multilevel_cdtdma(setup.users, pbar, setup.levels);
    case PolicyKind::CdTdmaAlo: return cdtdma_alo(pbar);
    case PolicyKind::CdTdmaInr: {
      InrOptions inr;
      inr.seed = options.seed;
      inr.eval_slots = options.slots;
      inr.early_shortfall = options.early_shortfall;
      inr.final_shortfall = options.final_shortfall;
      return cdtdma_inr(setup.users, setup.attempts, setup.levels, pbar, inr);
    }
  }
  throw ConfigError("unknown policy");
}

PointResult evaluate_point(const PolicySetup& setup, double snr_db, const EvalOptions& options,
                           std::uint64_t seed) {
  PointResult r;
  r.snr_db = snr_db;
  r.pbar = snr_to_power(snr_db);
  r.setup = setup;
  EvalOptions local = options;
  local.seed = seed;
  r.point = optimize_policy(setup, r.pbar, local);
  if (options.convention == PowerConvention::Standard) {
    r.normalized = r.point.normalized;
  } else {
    const double bench = ewfc_capacity(setup.users, setup.users * r.pbar, options.convention).capacity;
    r.normalized = r.point.throughput / bench;
  }
  if (options.simulate) {
    const SystemSpec spec = make_system_spec(r.point.params, setup.users, r.pbar);
    r.sim = simulate(spec, r.point.params, options.slots, mix_seed(seed + 1));
  }
  return r;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t snr_index, PolicyKind kind) {
  return mix_seed(seed) ^ stream_id(snr_index, static_cast<std::uint64_t>(kind));
}

std::vector<PointResult> run_sweep(const SweepConfig& config) {
  config.validate();
  const std::vector<double> grid = config.snr_grid();
  struct Task {
    PolicySetup setup;
    double snr_db;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (PolicyKind kind : config.policies) {
    const PolicySetup setup{kind, config.users, config.attempts_for(kind), config.levels_for(kind)};
    setup.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      tasks.push_back({setup, grid[i], point_seed(config.seed, i, kind)});
    }
  }

  EvalOptions options;
  options.convention = config.convention;
  options.simulate = config.simulate;
  options.slots = config.slots;
  options.early_shortfall = config.early_shortfall;
  options.final_shortfall = config.final_shortfall;

  std::vector<PointResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = evaluate_point(tasks[i].setup, tasks[i].snr_db, options, tasks[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto count = std::min<std::size_t>(
      config.threads > 0 ? static_cast<std::size_t>(config.threads) : hw, tasks.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::stable_sort(results.begin(), results.end(), [](const PointResult& a, const PointResult& b) {
    const auto na = policy_name(a.setup.kind);
    const auto nb = policy_name(b.setup.kind);
    return na != nb ? na < nb : a.snr_db < b.snr_db;
  });
  return results;
}

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<PointResult>& rows) {
  fmt::print(out, "# harqmac {}\n", HARQMAC_VERSION);
  fmt::print(out, "# seed {}\n", config.seed);
  fmt::print(out, "# convention {}\n", to_string(config.convention));
  fmt::print(out, "# slots {}\n", config.slots);
  fmt::print(out,
             "snr_db,pbar,policy,K,M,F,throughput_nats,throughput_bits,normalized,params,"
             "sim_throughput,sim_ci\n");
  for (const PointResult& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", number(r.snr_db), number(r.pbar),
               policy_name(r.setup.kind), r.setup.users, r.setup.attempts, r.setup.feedback_size(),
               number(r.point.throughput), number(r.point.throughput / kLn2), number(r.normalized),
               r.point.params.describe(), r.sim ? number(r.sim->throughput_est) : "",
               r.sim ? number(r.sim->ci_halfwidth_throughput) : "");
  }
  if (!out) throw std::ios_base::failure("write failed");
}

}  // namespace harqmac::app
