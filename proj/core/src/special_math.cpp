#include "harqmac/special_math.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"

namespace harqmac {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 500;

// E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
double exp_integral_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= kMaxIterations; ++k) {
    term *= -x / k;
    const double contribution = term / k;
    sum += contribution;
    if (std::abs(contribution) < std::abs(sum) * kEps) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// Modified Lentz evaluation of e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
double exp_integral_continued_fraction(double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) <= kEps) break;
  }
  return h * std::exp(-x);
}

}  // namespace

double exp_integral(double x) {
  if (!(x > 0.0)) {
    throw DomainError("exp_integral: argument must be > 0, got " + std::to_string(x));
  }
  if (std::isinf(x)) return 0.0;
  return x <= 1.0 ? exp_integral_series(x) : exp_integral_continued_fraction(x);
}

double rayleigh_cdf(double x) { return x > 0.0 ? -std::expm1(-x) : 0.0; }

double max_fading_cdf(int users, double x) {
  if (users < 1) throw DomainError("max_fading_cdf: users must be >= 1");
  if (!(x > 0.0)) return 0.0;
  return std::pow(rayleigh_cdf(x), users);
}

double max_fading_ccdf(int users, double x) {
  if (users < 1) throw DomainError("max_fading_ccdf: users must be >= 1");
  if (!(x > 0.0)) return 1.0;
  // 1 - (1 - e^{-x})^K = -expm1(K log1p(-e^{-x}))
  return -std::expm1(users * std::log1p(-std::exp(-x)));
}

double max_fading_quantile(int users, double u) {
  if (users < 1) throw DomainError("max_fading_quantile: users must be >= 1");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("max_fading_quantile: u must lie in [0, 1)");
  if (u == 0.0) return 0.0;
  // (1 - e^{-x})^K = u  =>  x = -log(1 - u^{1/K})
  return -std::log1p(-std::pow(u, 1.0 / users));
}

std::vector<double> sample_fading(const FadingModel& model, int users, Rng& rng) {
  if (users < 1) throw DomainError("sample_fading: users must be >= 1");
  std::vector<double> gains(static_cast<std::size_t>(users));
  sample_fading_into(model, gains, rng);
  return gains;
}

void sample_fading_into(const FadingModel& model, std::vector<double>& gains, Rng& rng) {
  switch (model.kind) {
    case FadingKind::UnitRayleigh:
      for (double& g : gains) g = rng.exponential();
      break;
  }
}

}  // namespace harqmac
