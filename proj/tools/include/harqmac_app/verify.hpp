#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "harqmac_app/evaluate.hpp"

namespace harqmac::app {

/// One analytic-versus-simulation comparison.
struct Agreement {
  std::string label;
  double reference = 0.0;
  double simulated = 0.0;
  double halfwidth = 0.0;  ///< 3 sigma of the simulation
  bool agree = false;
};

/// Throughput and realized-power agreement of one simulated point. The
/// reference throughput is the analytic optimum; for INR it is the exact
/// evaluation of the optimized level sets. The power reference is the budget
/// (or the INR level sets' exact power, which never exceeds it).
std::vector<Agreement> compare_point(const PointResult& point);

/// |simulated - reference| <= halfwidth, with a 1e-9 relative allowance for
/// quantities that are deterministic in the simulation.
bool within(double reference, double simulated, double halfwidth);

struct VerifyOptions {
  std::vector<double> snr_db{-10.0, 0.0, 10.0, 20.0};
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  int users = 2;
  int attempts = 2;
  int levels = 3;
  std::int64_t slots = 1'000'000;
  std::uint64_t seed = 1;
};

/// Runs every (policy, snr) point plus the ALO inter-renewal check, prints one
/// AGREE/DISAGREE line per comparison and returns true when all agree.
bool run_verify(const VerifyOptions& options, std::ostream& out);

}  // namespace harqmac::app
