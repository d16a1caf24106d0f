#include "harqmac_app/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>
#include <ostream>

#include "harqmac/error.hpp"
#include "harqmac_app/config.hpp"
#include "harqmac_app/evaluate.hpp"
#include "harqmac_app/verify.hpp"

namespace harqmac::app {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct CapacityArgs {
  int users = 1;
  double snr_db = 0.0;
  std::string convention = "standard";
};

struct PolicyArgs {
  std::string policy;
  int users = 2;
  int attempts = 1;
  int levels = 1;
  int feedback = 0;
  double snr_db = 0.0;
  bool simulate = false;
  std::int64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  std::string early = "silent";
  std::string final = "silent";
};

struct SweepArgs {
  std::string config;
  std::optional<double> from, to, step;
  std::optional<std::string> policies, convention, output, early, final;
  std::optional<int> users, attempts, levels, threads;
  std::optional<std::int64_t> slots;
  std::optional<std::uint64_t> seed;
  std::optional<bool> simulate;
};

int cmd_capacity(const CapacityArgs& a, std::ostream& out) {
  if (a.users < 1) throw ConfigError(fmt::format("K must be >= 1, got {}", a.users));
  const PowerConvention conv = parse_power_convention(a.convention);
  const double pbar = snr_to_power(a.snr_db);
  const WaterFillingSolution sol = ewfc_capacity(a.users, pbar, conv);
  fmt::print(out, "K            {}\n", a.users);
  fmt::print(out, "snr_db       {}\n", a.snr_db);
  fmt::print(out, "pbar         {:.10g}\n", pbar);
  fmt::print(out, "convention   {}\n", to_string(conv));
  fmt::print(out, "water_level  {:.10g}\n", sol.water_level);
  fmt::print(out, "capacity     {:.10g} nats ({:.10g} bits)\n", sol.capacity, sol.capacity / kLn2);
  fmt::print(out, "power        {:.10g}\n", sol.average_power);
  return kExitOk;
}

int cmd_policy(const PolicyArgs& a, std::ostream& out) {
  const PolicySetup setup{parse_policy(a.policy), a.users, a.attempts, a.levels};
  setup.validate();
  if (a.feedback != 0 && a.feedback != setup.feedback_size()) {
    throw ConfigError(fmt::format("{} with K = {}, L = {} implies F = {}, got F = {}", a.policy,
                                  a.users, a.levels, setup.feedback_size(), a.feedback));
  }
  EvalOptions opts;
  opts.simulate = a.simulate;
  opts.slots = a.slots;
  opts.early_shortfall = parse_shortfall(a.early);
  opts.final_shortfall = parse_shortfall(a.final);
  const PointResult r = evaluate_point(setup, a.snr_db, opts, a.seed);
  fmt::print(out, "policy       {}\n", a.policy);
  fmt::print(out, "K M F        {} {} {}\n", a.users, a.attempts, setup.feedback_size());
  fmt::print(out, "snr_db       {}\n", a.snr_db);
  fmt::print(out, "pbar         {:.10g}\n", r.pbar);
  fmt::print(out, "throughput   {:.10g} nats ({:.10g} bits)\n", r.point.throughput,
             r.point.throughput / kLn2);
  if (r.point.uncertainty > 0.0) fmt::print(out, "uncertainty  {:.3g} (3 sigma)\n", r.point.uncertainty);
  fmt::print(out, "normalized   {:.10g}\n", r.normalized);
  fmt::print(out, "params       {}\n", r.point.params.describe());
  if (!r.sim) return kExitOk;
  bool ok = true;
  for (const Agreement& c : compare_point(r)) {
    fmt::print(out, "{:<9} {} ref {:.10g} sim {:.10g} +- {:.3g}\n", c.agree ? "AGREE" : "DISAGREE",
               c.label, c.reference, c.simulated, c.halfwidth);
    ok = ok && c.agree;
  }
  return ok ? kExitOk : kExitNumerical;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepConfig cfg = a.config.empty() ? SweepConfig{} : load_sweep_config(a.config);
  if (a.from) cfg.snr_from = *a.from;
  if (a.to) cfg.snr_to = *a.to;
  if (a.step) cfg.snr_step = *a.step;
  if (a.policies) cfg.policies = parse_policy_list(*a.policies);
  if (a.convention) cfg.convention = parse_power_convention(*a.convention);
  if (a.output) cfg.output = *a.output;
  if (a.early) cfg.early_shortfall = parse_shortfall(*a.early);
  if (a.final) cfg.final_shortfall = parse_shortfall(*a.final);
  if (a.users) cfg.users = *a.users;
  if (a.attempts) cfg.attempts = *a.attempts;
  if (a.levels) cfg.levels = *a.levels;
  if (a.threads) cfg.threads = *a.threads;
  if (a.slots) cfg.slots = *a.slots;
  if (a.seed) cfg.seed = *a.seed;
  if (a.simulate) cfg.simulate = *a.simulate;
  cfg.validate();

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw std::ios_base::failure(fmt::format("cannot open '{}' for writing", cfg.output));
  }
  const std::vector<PointResult> rows = run_sweep(cfg);
  write_csv(cfg.output.empty() ? out : file, cfg, rows);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-controlled HARQ throughput on the block-fading MAC", "harqmac"};
  app.require_subcommand(1);

  CapacityArgs cap;
  auto* c = app.add_subcommand("capacity", "Ergodic water-filling capacity at one SNR");
  c->add_option("-K,--users", cap.users, "Number of users")->capture_default_str();
  c->add_option("--snr-db", cap.snr_db, "Average SNR in dB (pbar = 10^(snr/10))")->required();
  c->add_option("--convention", cap.convention, "Power convention: standard|paper")
      ->capture_default_str();

  PolicyArgs pol;
  auto* p = app.add_subcommand("policy", "Optimize one policy at one SNR");
  p->add_option("--policy", pol.policy, "Policy name")->required();
  p->add_option("-K,--users", pol.users, "Number of users")->capture_default_str();
  p->add_option("-M,--attempts", pol.attempts, "Transmission attempts per packet")->capture_default_str();
  p->add_option("-L,--levels", pol.levels, "Power levels")->capture_default_str();
  p->add_option("-F,--feedback", pol.feedback, "Expected feedback alphabet size (checked)");
  p->add_option("--snr-db", pol.snr_db, "Average SNR in dB")->required();
  p->add_flag("--simulate", pol.simulate, "Cross-check with a slot-level simulation");
  p->add_option("--slots", pol.slots, "Simulated slots")->capture_default_str();
  p->add_option("--seed", pol.seed, "Random seed")->capture_default_str();
  p->add_option("--early-shortfall", pol.early, "INR rule before the last attempt: silent|send_top");
  p->add_option("--final-shortfall", pol.final, "INR rule at the last attempt: silent|send_top");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "SNR sweep over policies, written as CSV");
  s->add_option("--config", sw.config, "INI configuration file");
  s->add_option("--from", sw.from, "First SNR in dB");
  s->add_option("--to", sw.to, "Last SNR in dB");
  s->add_option("--step", sw.step, "SNR step in dB");
  s->add_option("--policies", sw.policies, "Comma-separated policy names or 'all'");
  s->add_option("-K,--users", sw.users, "Number of users");
  s->add_option("-M,--attempts", sw.attempts, "Attempts for cdtdma_alo and cdtdma_inr");
  s->add_option("-L,--levels", sw.levels, "Levels for multilevel and cdtdma_inr");
  s->add_option("--slots", sw.slots, "Simulated slots per point");
  s->add_option("--seed", sw.seed, "Random seed");
  s->add_option("--convention", sw.convention, "Normalization convention: standard|paper");
  s->add_option("--simulate", sw.simulate, "Simulate every point (true|false)");
  s->add_option("--threads", sw.threads, "Worker threads (0 = hardware concurrency)");
  s->add_option("-o,--output", sw.output, "Output CSV path (default stdout)");
  s->add_option("--early-shortfall", sw.early, "INR rule before the last attempt");
  s->add_option("--final-shortfall", sw.final, "INR rule at the last attempt");

  VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "Analytic versus simulation agreement suite");
  v->add_option("--snr-db", ver.snr_db, "SNR points in dB")->capture_default_str();
  v->add_option("-K,--users", ver.users, "Number of users")->capture_default_str();
  v->add_option("-M,--attempts", ver.attempts, "Attempts for cdtdma_alo and cdtdma_inr")
      ->capture_default_str();
  v->add_option("-L,--levels", ver.levels, "Levels for multilevel and cdtdma_inr")
      ->capture_default_str();
  v->add_option("--slots", ver.slots, "Simulated slots per point")->capture_default_str();
  v->add_option("--seed", ver.seed, "Random seed")->capture_default_str();
  std::string verify_policies;
  v->add_option("--policies", verify_policies, "Comma-separated policy names or 'all'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage;
    const int code = app.exit(e, usage, usage);
    fmt::print(code == 0 ? out : err, "{}", usage.str());
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c) return cmd_capacity(cap, out);
    if (*p) return cmd_policy(pol, out);
    if (*s) return cmd_sweep(sw, out);
    if (!verify_policies.empty()) ver.policies = parse_policy_list(verify_policies);
    if (ver.slots < 10'000) throw ConfigError("verify: slots must be >= 1e4");
    return run_verify(ver, out) ? kExitOk : kExitNumerical;
  } catch (const ConfigError& e) {
    fmt::print(err, "configuration error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace harqmac::app
