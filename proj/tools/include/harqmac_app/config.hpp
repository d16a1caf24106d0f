#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harqmac/capacity.hpp"
#include "harqmac/inr.hpp"
#include "harqmac/policies.hpp"

namespace harqmac::app {

/// Per-policy values read from a `[policy_name]` section.
struct PolicyOverride {
  std::optional<int> attempts;
  std::optional<int> levels;
};

struct SweepConfig {
  double snr_from = -10.0;
  double snr_to = 20.0;
  double snr_step = 5.0;
  std::vector<PolicyKind> policies{std::begin(kAllPolicies), std::end(kAllPolicies)};
  int users = 2;
  int attempts = 2;  ///< M for cdtdma_alo and cdtdma_inr
  int levels = 3;    ///< L for multilevel and cdtdma_inr
  std::int64_t slots = 1'000'000;
  std::uint64_t seed = 1;
  PowerConvention convention = PowerConvention::Standard;
  bool simulate = false;
  int threads = 0;  ///< 0 picks the hardware concurrency
  std::string output;  ///< empty writes to stdout
  InrShortfall early_shortfall = InrShortfall::Silent;
  InrShortfall final_shortfall = InrShortfall::Silent;
  std::map<PolicyKind, PolicyOverride> overrides;

  /// Throws ConfigError on from > to, step <= 0, slots < 1e4 or K < 1.
  void validate() const;
  std::vector<double> snr_grid() const;
  int attempts_for(PolicyKind kind) const;
  int levels_for(PolicyKind kind) const;
};

/// Reads an INI file: a `[sweep]` section with the scalar fields and optional
/// per-policy sections holding `attempts` and `levels`. Throws ConfigError on
/// unreadable files, unknown keys or malformed values.
SweepConfig load_sweep_config(const std::string& path);

std::vector<PolicyKind> parse_policy_list(const std::string& text);
InrShortfall parse_shortfall(const std::string& text);
std::string_view shortfall_name(InrShortfall rule);

}  // namespace harqmac::app
