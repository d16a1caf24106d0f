#pragma once

#include <vector>

namespace harqmac {

class Rng;

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
///
/// Power series for x <= 1, modified Lentz continued fraction above.
/// Relative accuracy is close to machine precision on (0, 700].
/// Throws DomainError for x <= 0 (and NaN).
double exp_integral(double x);

/// cdf of a unit-mean exponential power gain, 0 for x < 0.
double rayleigh_cdf(double x);

/// cdf of max{G_1..G_K} for K iid unit-mean exponential gains: rayleigh_cdf(x)^K.
double max_fading_cdf(int users, double x);

/// Probability that the max of K gains exceeds x; accurate for small tails.
double max_fading_ccdf(int users, double x);

/// Inverse of max_fading_cdf on [0, 1).
double max_fading_quantile(int users, double u);

enum class FadingKind { UnitRayleigh };

/// Block fading model: gains iid across users and slots.
struct FadingModel {
  FadingKind kind = FadingKind::UnitRayleigh;

  double cdf(double x) const { return rayleigh_cdf(x); }
  double mean() const { return 1.0; }
};

/// Draws K independent power gains for one slot.
std::vector<double> sample_fading(const FadingModel& model, int users, Rng& rng);

/// In-place variant for the simulator hot loop; `gains.size()` is the user count.
void sample_fading_into(const FadingModel& model, std::vector<double>& gains, Rng& rng);

}  // namespace harqmac
