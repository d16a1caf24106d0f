#include "harqmac/capacity.hpp"

#include <cmath>
#include <fmt/format.h>

#include "harqmac/error.hpp"
#include "harqmac/special_math.hpp"

namespace harqmac {
namespace {

constexpr double kBracketLow = 1e-8;
constexpr double kBracketHigh = 50.0;
constexpr double kRelativeResidual = 1e-9;

double binomial(int n, int k) {
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

void check_inputs(int users, double water_level) {
  if (users < 1) throw DomainError("water-filling: users must be >= 1");
  if (!(water_level > 0.0) || !std::isfinite(water_level)) {
    throw DomainError(fmt::format("water-filling: water level must be a finite value > 0, got {}",
                                  water_level));
  }
}

}  // namespace

std::string_view to_string(PowerConvention convention) {
  return convention == PowerConvention::Standard ? "standard" : "paper";
}

PowerConvention parse_power_convention(std::string_view text) {
  if (text == "standard") return PowerConvention::Standard;
  if (text == "paper") return PowerConvention::Paper;
  throw ConfigError(fmt::format("unknown power convention '{}' (expected standard|paper)", text));
}

double ewfc_power_of_level(int users, double water_level, PowerConvention convention) {
  check_inputs(users, water_level);
  const double x = water_level;
  double total = 0.0;
  for (int k = 1; k <= users; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    const double kx = k * x;
    total += sign * binomial(users, k) * (std::exp(-kx) - kx * exp_integral(kx));
  }
  return convention == PowerConvention::Standard ? total / x : total;
}

double ewfc_capacity_at_level(int users, double water_level) {
  check_inputs(users, water_level);
  double total = 0.0;
  for (int k = 1; k <= users; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    total += sign * binomial(users, k) * exp_integral(k * water_level);
  }
  return total;
}

WaterFillingSolution ewfc_capacity(int users, double avg_power, PowerConvention convention) {
  if (users < 1) throw DomainError("ewfc_capacity: users must be >= 1");
  const char* valid = convention == PowerConvention::Standard ? "(0, inf)" : "(0, 1)";
  if (!(avg_power > 0.0) || !std::isfinite(avg_power) ||
      (convention == PowerConvention::Paper && avg_power >= 1.0)) {
    throw RangeError(fmt::format("ewfc_capacity: average power {} outside the achievable interval {} "
                                 "for the {} convention",
                                 avg_power, valid, to_string(convention)));
  }
  auto power = [&](double x) { return ewfc_power_of_level(users, x, convention); };

  // power(x) is strictly decreasing; widen the bracket until it straddles the target.
  double lo = kBracketLow;
  double hi = kBracketHigh;
  while (power(lo) < avg_power) {
    lo *= 1e-2;
    if (lo < 1e-300) {
      throw RangeError(fmt::format("ewfc_capacity: average power {} exceeds the achievable interval {}",
                                   avg_power, valid));
    }
  }
  while (power(hi) > avg_power) {
    hi *= 2.0;
    if (hi > 700.0) {
      throw RangeError(fmt::format("ewfc_capacity: average power {} below the representable part of {}",
                                   avg_power, valid));
    }
  }

  double x = std::sqrt(lo * hi);
  for (int iter = 0; iter < 400; ++iter) {
    x = std::sqrt(lo * hi);
    const double p = power(x);
    if (std::abs(p - avg_power) <= 0.25 * kRelativeResidual * avg_power) break;
    if (p > avg_power) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi / lo - 1.0 < 4e-16) break;
  }

  WaterFillingSolution solution;
  solution.water_level = x;
  solution.capacity = ewfc_capacity_at_level(users, x);
  solution.average_power = power(x);
  solution.users = users;
  solution.convention = convention;
  return solution;
}

double ewfc_benchmark(int users, double per_user_power) {
  if (per_user_power == 0.0) return 0.0;
  return ewfc_capacity(users, users * per_user_power, PowerConvention::Standard).capacity;
}

}  // namespace harqmac
