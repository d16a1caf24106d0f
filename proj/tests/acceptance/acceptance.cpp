// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "harqmac/capacity.hpp"
#include "harqmac/markov_renewal.hpp"
#include "harqmac/policies.hpp"
#include "harqmac/special_math.hpp"
#include "harqmac_app/cli.hpp"
#include "harqmac_app/evaluate.hpp"
#include "harqmac_app/verify.hpp"
#include "oracles.hpp"

using namespace harqmac;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  fmt::print("{} {} {}\n", pass ? "PASS" : "FAIL", id, detail);
  if (!pass) ++failures;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void special_functions() {
  Stopwatch clock;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = 1e-3 * std::pow(3e4, i / 49.0);
    const double ref = oracle::e1_quadrature(x);
    worst = std::max(worst, std::abs(exp_integral(x) - ref) / ref);
  }
  const double t = clock.seconds();
  report("1", worst <= 1e-10 && t < 1.0,
         fmt::format("exp_integral max rel err {:.3g} (<= 1e-10), {:.2f} s (< 1 s)", worst, t));
}

void capacity_oracle() {
  Stopwatch clock;
  std::vector<double> levels;
  for (int j = 0; j < 10; ++j) levels.push_back(0.05 * std::pow(60.0, j / 9.0));
  int misses = 0;
  double worst_z = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const auto mc = oracle::water_filling_mc(k, levels, 10'000'000, 1000 + k);
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const double c = ewfc_capacity_at_level(k, levels[j]);
      const double p = ewfc_power_of_level(k, levels[j], PowerConvention::Standard);
      const double zc = std::abs(c - mc[j].capacity.mean) / (mc[j].capacity.halfwidth / 3.0);
      const double zp = std::abs(p - mc[j].power.mean) / (mc[j].power.halfwidth / 3.0);
      worst_z = std::max({worst_z, zc, zp});
      misses += zc > 3.0;
      misses += zp > 3.0;
    }
  }
  const double t = clock.seconds();
  report("2", misses == 0 && t < 30.0,
         fmt::format("60 capacity/power comparisons, {} outside 3 sigma (max |z| {:.2f}), {:.1f} s",
                     misses, worst_z, t));
}

double grid_joint_plus_tdma(double pbar) {
  auto single = [](double p) {
    return oracle::dense_1d([p](double s) { return oracle::static_tdma(1, p, s); }, 4001, 2001)
        .value;
  };
  auto joint = [](double p) {
    return oracle::dense_1d([p](double s) { return oracle::joint_symmetric(p, s); }, 4001, 2001)
        .value;
  };
  std::map<double, double> single_cache, joint_cache;
  auto cached = [](std::map<double, double>& cache, double p, auto&& f) {
    const auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    return cache[p] = f(p);
  };
  auto objective = [&](const std::vector<double>& x) {
    const double tau = std::clamp(x[0], 0.0, 1.0);
    const double alpha = std::clamp(x[1], 0.0, 1.0);
    double v = 0.0;
    if (tau > 0.0 && alpha > 0.0) {
      v += tau * cached(single_cache, 2.0 * alpha * pbar / tau, single);
    }
    if (tau < 1.0 && alpha < 1.0) {
      v += (1.0 - tau) * cached(joint_cache, (1.0 - alpha) * pbar / (1.0 - tau), joint);
    }
    return v;
  };
  return oracle::zoom_grid_max(objective, {0.0, 0.0}, {1.0, 1.0}, 6, 2).value;
}

double grid_multilevel(int users, double pbar) {
  auto f = [&](const std::vector<double>& x) {
    if (!(x[0] > 0.0 && x[1] > x[0] && x[2] > x[1])) return 0.0;
    return oracle::multilevel(users, pbar, x);
  };
  double best = 0.0;
  for (double top : {1.0, 2.0, 4.0, 8.0}) {
    best = std::max(best,
                    oracle::zoom_grid_max(f, {0.01, 0.02, 0.03}, {top, top, top}, 25, 8).value);
  }
  return best;
}

void closed_form_vs_grid() {
  Stopwatch clock;
  double worst = 0.0;
  std::string worst_label;
  auto check = [&](const std::string& label, double analytic, double grid) {
    const double gap = std::abs(analytic - grid);
    if (gap > worst) {
      worst = gap;
      worst_label = label;
    }
  };
  for (double p : {0.1, 1.0, 10.0}) {
    const std::string at = fmt::format(" at P={}", p);
    check("static_tdma" + at, static_tdma(2, p).throughput,
          oracle::dense_1d([p](double s) { return oracle::static_tdma(2, p, s); }).value);
    check("joint" + at, joint_decoding_sym(p).throughput,
          oracle::dense_1d([p](double s) { return oracle::joint_symmetric(p, s); }, 20'001, 2'001)
              .value);
    check("joint_tdma" + at, joint_plus_tdma(p).throughput, grid_joint_plus_tdma(p));
    check("cdtdma_on" + at, cdtdma_on(2, p).throughput,
          oracle::dense_1d([p](double s) { return oracle::cdtdma_on(2, p, s); }).value);
    check("cdtdma_onoff" + at, cdtdma_onoff(2, p).throughput,
          oracle::dense_1d([p](double s) { return oracle::cdtdma_onoff(2, p, s); }).value);
    check("multilevel" + at, multilevel_cdtdma(2, p, 3).throughput, grid_multilevel(2, p));
    check("cdtdma_alo" + at, cdtdma_alo(p).throughput,
          oracle::dense_1d([p](double s) { return oracle::alo_throughput(p, s); }).value);
  }
  const double t = clock.seconds();
  report("3", worst <= 1e-4 && t < 60.0,
         fmt::format("21 optima, max |analytic - grid| {:.3g} ({}), {:.1f} s", worst, worst_label,
                     t));
}

void analytic_vs_simulation() {
  Stopwatch clock;
  const std::vector<double> snrs{-10.0, 0.0, 10.0, 20.0};
  int comparisons = 0;
  std::vector<std::string> misses;
  for (PolicyKind kind : kAllPolicies) {
    app::PolicySetup setup{kind, 2, 1, 1};
    if (kind == PolicyKind::CdTdmaAlo || kind == PolicyKind::CdTdmaInr) setup.attempts = 2;
    if (kind == PolicyKind::MultilevelCdTdma || kind == PolicyKind::CdTdmaInr) setup.levels = 3;
    app::EvalOptions opts;
    opts.simulate = true;
    opts.slots = 1'000'000;
    for (std::size_t i = 0; i < snrs.size(); ++i) {
      const app::PointResult r =
          app::evaluate_point(setup, snrs[i], opts, app::point_seed(1, i, kind));
      for (const app::Agreement& a : app::compare_point(r)) {
        ++comparisons;
        if (!a.agree) {
          misses.push_back(fmt::format("{} {} dB {}", policy_name(kind), snrs[i], a.label));
        }
      }
    }
  }
  const double t = clock.seconds();
  std::string detail = fmt::format("{} comparisons at 1e6 slots, {} outside 3 sigma, {:.0f} s",
                                   comparisons, misses.size(), t);
  for (const std::string& m : misses) detail += "; " + m;
  report("4", misses.empty() && t < 600.0, detail);
}

void alo_identities() {
  double worst_gap = 0.0;
  double worst_pi = 0.0;
  int cycle_misses = 0;
  for (int i = 0; i <= 6; ++i) {
    const double snr = -10.0 + 5.0 * i;
    const double p = app::snr_to_power(snr);
    worst_gap = std::max(worst_gap, std::abs(cdtdma_alo(p).throughput - cdtdma_onoff(2, p).throughput));
    const ThroughputPoint alo = cdtdma_alo(p);
    const double s = alo.params.thresholds[0];
    const double prob = max_fading_ccdf(2, s);
    const FsmModel fsm = build_alo_fsm(s, p);
    const std::vector<double> pi = stationary_distribution(fsm);
    worst_pi = std::max(worst_pi, std::abs(pi[fsm.renewal_state] * (4.0 - prob) - 1.0));
    app::EvalOptions opts;
    opts.simulate = true;
    const app::PointResult r = app::evaluate_point(app::PolicySetup{PolicyKind::CdTdmaAlo, 2, 2, 1},
                                                   snr, opts, app::point_seed(7, i, PolicyKind::CdTdmaAlo));
    cycle_misses += !app::within(4.0 - prob, r.sim->mean_cycle_length, r.sim->ci_halfwidth_cycle);
  }
  double worst_series = 0.0;
  for (int i = 0; i <= 95; ++i) {
    const double p = 0.05 + 0.01 * i;
    for (double rate : {0.1, 1.0, 5.0}) {
      worst_series = std::max(worst_series, std::abs(alo_left_branch_series(p, rate) - 3.0 * p * rate));
    }
  }
  report("5a", worst_gap <= 1e-9, fmt::format("|alo - onoff| max {:.3g} over 7 SNRs (<= 1e-9)", worst_gap));
  report("5b", cycle_misses == 0,
         fmt::format("inter-renewal time vs 4 - p: {} of 7 outside 3 sigma", cycle_misses));
  report("5c", worst_pi <= 1e-12, fmt::format("|pi11 (4 - p) - 1| max {:.3g} (<= 1e-12)", worst_pi));
  report("5d", worst_series <= 1e-9,
         fmt::format("left-branch series vs 3pR max gap {:.3g} over p in [0.05, 1] (<= 1e-9)",
                     worst_series));
}

struct SweepTable {
  std::map<PolicyKind, std::map<double, double>> normalized, throughput;
};

SweepTable default_sweep() {
  app::SweepConfig cfg;
  SweepTable t;
  for (const app::PointResult& r : app::run_sweep(cfg)) {
    t.normalized[r.setup.kind][r.snr_db] = r.normalized;
    t.throughput[r.setup.kind][r.snr_db] = r.point.throughput;
  }
  return t;
}

std::pair<double, double> minimum(const std::map<double, double>& row) {
  const auto it = std::min_element(row.begin(), row.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
  return {it->second, it->first};
}

void floors(const SweepTable& t) {
  auto floor_line = [&](const std::string& id, PolicyKind kind, double bound) {
    const auto [value, snr] = minimum(t.normalized.at(kind));
    std::string row;
    for (const auto& [db, v] : t.normalized.at(kind)) row += fmt::format(" {:.4f}", v);
    report(id, value >= bound,
           fmt::format("{} min normalized {:.4f} at {} dB (>= {}); sweep:{}", policy_name(kind),
                       value, snr, bound, row));
  };
  floor_line("6a", PolicyKind::CdTdmaOnOff, 0.65);
  floor_line("6b", PolicyKind::MultilevelCdTdma, 0.79);
  floor_line("6c", PolicyKind::CdTdmaInr, 0.83);
}

void orderings(const SweepTable& t) {
  const auto& thr = t.throughput;
  const double st_lo = thr.at(PolicyKind::StaticTdma).at(-10.0);
  const double jd_lo = thr.at(PolicyKind::JointDecoding).at(-10.0);
  report("7a", st_lo > jd_lo,
         fmt::format("at -10 dB static_tdma {:.6f} > joint {:.6f}", st_lo, jd_lo));
  const double st_hi = thr.at(PolicyKind::StaticTdma).at(20.0);
  const double jd_hi = thr.at(PolicyKind::JointDecoding).at(20.0);
  report("7b", jd_hi > st_hi, fmt::format("at 20 dB joint {:.6f} > static_tdma {:.6f}", jd_hi, st_hi));

  double worst_jt = std::numeric_limits<double>::infinity();
  double worst_on = std::numeric_limits<double>::infinity();
  for (const auto& [snr, v] : thr.at(PolicyKind::JointPlusTdma)) {
    const double best = std::max(thr.at(PolicyKind::StaticTdma).at(snr),
                                 thr.at(PolicyKind::JointDecoding).at(snr));
    worst_jt = std::min(worst_jt, v - best);
    worst_on = std::min(worst_on, thr.at(PolicyKind::CdTdmaOnOff).at(snr) -
                                      thr.at(PolicyKind::CdTdmaOn).at(snr));
  }
  report("7c", worst_jt >= -1e-6,
         fmt::format("joint_tdma - max(static, joint) min {:.3g} (>= -1e-6)", worst_jt));
  report("7d", worst_on >= 0.0, fmt::format("cdtdma_onoff - cdtdma_on min {:.3g} (>= 0)", worst_on));

  double worst_ml = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 6; ++i) {
    const double p = app::snr_to_power(-10.0 + 5.0 * i);
    const double l1 = multilevel_cdtdma(2, p, 1).throughput;
    const double l2 = multilevel_cdtdma(2, p, 2).throughput;
    const double l3 = multilevel_cdtdma(2, p, 3).throughput;
    worst_ml = std::min({worst_ml, l2 - l1, l3 - l2});
  }
  report("7e", worst_ml >= 0.0,
         fmt::format("multilevel L=1,2,3 smallest step {:.3g} over 7 SNRs (>= 0)", worst_ml));
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto config = dir / "harqmac_acceptance.ini";
  std::ofstream(config) << "[sweep]\nsimulate = true\nslots = 100000\n";
  std::vector<std::string> outputs;
  int worst_code = 0;
  for (int run = 0; run < 2; ++run) {
    const std::string out = (dir / fmt::format("harqmac_acceptance_{}.csv", run)).string();
    const std::string cfg = config.string();
    const char* argv[] = {"harqmac", "sweep", "--config", cfg.c_str(), "-o", out.c_str()};
    std::ostringstream sink_out, sink_err;
    worst_code = std::max(worst_code, app::run_cli(6, argv, sink_out, sink_err));
    outputs.push_back(slurp(out));
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
  report("8", worst_code == 0 && same,
         fmt::format("two simulated sweeps, {} bytes each, identical: {}", outputs[0].size(),
                     same ? "yes" : "no"));
}

}  // namespace

int main() {
  special_functions();
  capacity_oracle();
  closed_form_vs_grid();
  analytic_vs_simulation();
  alo_identities();
  const SweepTable sweep = default_sweep();
  floors(sweep);
  orderings(sweep);
  determinism();
  fmt::print("{} failing\n", failures);
  return failures == 0 ? 0 : 1;
}
