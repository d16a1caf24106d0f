#pragma once

#include <string_view>

namespace harqmac {

/// How the water level maps to average power.
///
/// Standard: E[(1/x - 1/G)^+] with G the largest of K unit exponential gains,
///   i.e. the total power the scheduled users spend per slot.
/// Paper: the literal closed form  sum (-1)^{k-1} C(K,k) (e^{-kx} - kx E1(kx)),
///   which equals x times the standard value and only spans (0, 1).
enum class PowerConvention { Standard, Paper };

std::string_view to_string(PowerConvention convention);
PowerConvention parse_power_convention(std::string_view text);

struct WaterFillingSolution {
  double water_level = 0.0;  ///< x: users transmit only when max gain >= x
  double capacity = 0.0;     ///< sum rate, nats per channel use
  double average_power = 0.0;
  int users = 1;
  PowerConvention convention = PowerConvention::Standard;
};

/// Average power of multiuser water-filling at water level x > 0.
double ewfc_power_of_level(int users, double water_level,
                           PowerConvention convention = PowerConvention::Standard);

/// Ergodic sum capacity sum_k (-1)^{k-1} C(K,k) E1(k x).
double ewfc_capacity_at_level(int users, double water_level);

/// Solves power(x) = avg_power by bisection on log x (relative residual <= 1e-9)
/// and evaluates the capacity there. RangeError if avg_power is not attainable.
WaterFillingSolution ewfc_capacity(int users, double avg_power,
                                   PowerConvention convention = PowerConvention::Standard);

/// Benchmark for a symmetric system in which each of K users has long-term
/// budget `per_user_power`: water-filling with total power K * per_user_power
/// (standard convention). All normalized throughputs divide by this.
double ewfc_benchmark(int users, double per_user_power);

}  // namespace harqmac
