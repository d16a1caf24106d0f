#include "harqmac_app/verify.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "harqmac/inr.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac::app {

bool within(double reference, double simulated, double halfwidth) {
  return std::abs(simulated - reference) <= halfwidth + 1e-9 * std::max(1.0, std::abs(reference));
}

std::vector<Agreement> compare_point(const PointResult& point) {
  std::vector<Agreement> out;
  if (!point.sim) return out;
  const SimReport& sim = *point.sim;
  const std::string where =
      fmt::format("{} K={} snr={}dB", policy_name(point.setup.kind), point.setup.users, point.snr_db);

  double thr_ref = point.point.throughput;
  double pw_ref = point.pbar;
  if (point.setup.kind == PolicyKind::CdTdmaInr && point.point.params.inr.attempts() > 0) {
    const InrEvaluation exact =
        inr_evaluate(point.point.params.inr, GainDistribution{point.setup.users}, 100'000, 1);
    thr_ref = exact.throughput;
    pw_ref = exact.power / point.setup.users;
  }
  Agreement thr{where + " throughput", thr_ref, sim.throughput_est, sim.ci_halfwidth_throughput};
  thr.agree = within(thr.reference, thr.simulated, thr.halfwidth);
  Agreement pw{where + " power", pw_ref, sim.power_est, sim.ci_halfwidth_power};
  pw.agree = within(pw.reference, pw.simulated, pw.halfwidth);
  out.push_back(thr);
  out.push_back(pw);
  if (point.setup.kind == PolicyKind::CdTdmaAlo) {
    const double p = max_fading_ccdf(2, point.point.params.thresholds.front());
    Agreement cyc{where + " inter-renewal", 4.0 - p, sim.mean_cycle_length, sim.ci_halfwidth_cycle};
    cyc.agree = within(cyc.reference, cyc.simulated, cyc.halfwidth);
    out.push_back(cyc);
  }
  return out;
}

bool run_verify(const VerifyOptions& options, std::ostream& out) {
  EvalOptions eval;
  eval.simulate = true;
  eval.slots = options.slots;
  bool all = true;
  for (PolicyKind kind : options.policies) {
    const bool multi = kind == PolicyKind::CdTdmaAlo || kind == PolicyKind::CdTdmaInr;
    const bool leveled = kind == PolicyKind::MultilevelCdTdma || kind == PolicyKind::CdTdmaInr;
    const PolicySetup setup{kind, options.users, multi ? options.attempts : 1,
                            leveled ? options.levels : 1};
    for (std::size_t i = 0; i < options.snr_db.size(); ++i) {
      const PointResult r =
          evaluate_point(setup, options.snr_db[i], eval, point_seed(options.seed, i, kind));
      for (const Agreement& a : compare_point(r)) {
        all = all && a.agree;
        fmt::print(out, "{:<9} {:<44} ref {:<14.8g} sim {:<14.8g} +- {:.3g}\n",
                   a.agree ? "AGREE" : "DISAGREE", a.label, a.reference, a.simulated, a.halfwidth);
      }
    }
  }
  return all;
}

}  // namespace harqmac::app
