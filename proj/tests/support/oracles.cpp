#include "oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

namespace harqmac::oracle {

double e1_quadrature(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tail = integrator.integrate([x](double u) { return std::exp(-u) / (x + u); },
                                           0.0, std::numeric_limits<double>::infinity(), 1e-15);
  return std::exp(-x) * tail;
}

std::vector<WaterFillingMc> water_filling_mc(int users, const std::vector<double>& levels,
                                             std::int64_t draws, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> expo(1.0);
  const std::size_t n = levels.size();
  std::vector<double> c_sum(n), c_sq(n), p_sum(n), p_sq(n);
  for (std::int64_t i = 0; i < draws; ++i) {
    double g = 0.0;
    for (int k = 0; k < users; ++k) g = std::max(g, expo(gen));
    for (std::size_t j = 0; j < n; ++j) {
      const double x = levels[j];
      if (g < x) continue;
      const double c = std::log(g / x);
      const double p = 1.0 / x - 1.0 / g;
      c_sum[j] += c;
      c_sq[j] += c * c;
      p_sum[j] += p;
      p_sq[j] += p * p;
    }
  }
  const auto d = static_cast<double>(draws);
  auto estimate = [d](double sum, double sq) {
    const double mean = sum / d;
    const double var = std::max(0.0, sq / d - mean * mean);
    return McEstimate{mean, 3.0 * std::sqrt(var / d)};
  };
  std::vector<WaterFillingMc> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j].capacity = estimate(c_sum[j], c_sq[j]);
    out[j].power = estimate(p_sum[j], p_sq[j]);
  }
  return out;
}

GridMax grid_max(const std::function<double(double)>& f, double lo, double hi, long points,
                 bool log_spaced) {
  GridMax best{lo, -std::numeric_limits<double>::infinity()};
  for (long i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double x = log_spaced ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

GridMaxN zoom_grid_max(const std::function<double(const std::vector<double>&)>& f,
                       std::vector<double> lower, std::vector<double> upper, int points_per_dim,
                       int rounds) {
  const std::size_t dim = lower.size();
  GridMaxN best{lower, -std::numeric_limits<double>::infinity()};
  for (int round = 0; round <= rounds; ++round) {
    std::vector<int> idx(dim, 0);
    std::vector<double> x(dim);
    while (true) {
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = lower[d] + (upper[d] - lower[d]) * idx[d] / (points_per_dim - 1);
      }
      const double v = f(x);
      if (v > best.value) best = {x, v};
      std::size_t d = 0;
      while (d < dim && ++idx[d] == points_per_dim) idx[d++] = 0;
      if (d == dim) break;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      const double cell = (upper[d] - lower[d]) / (points_per_dim - 1);
      lower[d] = best.argmax[d] - 2.0 * cell;
      upper[d] = best.argmax[d] + 2.0 * cell;
    }
  }
  return best;
}

std::vector<double> power_iteration(const std::vector<std::vector<double>>& transition, double tol,
                                    long max_iters) {
  const std::size_t n = transition.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (long it = 0; it < max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * transition[i][j];
    }
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change += std::abs(next[j] - pi[j]);
    pi.swap(next);
    if (change < tol) break;
  }
  return pi;
}

double max_ccdf(int users, double x) { return 1.0 - std::pow(1.0 - std::exp(-x), users); }

double static_tdma(int users, double pbar, double s) {
  return std::exp(-s) * std::log(1.0 + s * users * pbar);
}

double cdtdma_on(int users, double pbar, double s) {
  return std::log(1.0 + s * users * pbar) * max_ccdf(users, s);
}

double cdtdma_onoff(int users, double pbar, double s) {
  const double p = max_ccdf(users, s);
  return p > 0.0 ? std::log(1.0 + s * users * pbar / p) * p : 0.0;
}

double multilevel(int users, double pbar, const std::vector<double>& thresholds) {
  // Level l is used when s_l <= G < s_{l+1} and spends (e^R - 1)/s_l.
  double weight = 0.0;
  for (std::size_t l = 0; l < thresholds.size(); ++l) {
    const double hi = l + 1 < thresholds.size() ? max_ccdf(users, thresholds[l + 1]) : 0.0;
    weight += (max_ccdf(users, thresholds[l]) - hi) / thresholds[l];
  }
  if (weight <= 0.0) return 0.0;
  return std::log(1.0 + users * pbar / weight) * max_ccdf(users, thresholds.front());
}

JointRegions joint_regions(double rate1, double rate2, double power1, double power2) {
  using boost::math::quadrature::gauss_kronrod;
  auto finite = [](auto f, double a, double b) {
    return gauss_kronrod<double, 31>::integrate(f, a, b, 5, 1e-12);
  };
  const double c1 = std::expm1(rate1);
  const double c2 = std::expm1(rate2);
  const double c12 = std::expm1(rate1 + rate2);
  JointRegions out;
  // Both: g1 >= c1/P1 and g2 P2 >= max(c2, c12 - g1 P1). Beyond x* the inner
  // bound is c2 and the integral is closed form.
  const double x0 = c1 / power1;
  const double xs = (c12 - c2) / power1;
  const double inner_tail = std::exp(-c2 / power2);
  double both = std::exp(-xs) * inner_tail;
  if (xs > x0) {
    both += finite(
        [&](double x) { return std::exp(-x) * std::exp(-std::max(c2, c12 - x * power1) / power2); },
        x0, xs);
  }
  out.both = both;
  // User 1 only: g2 < c2/P2 and g1 P1 >= c1 (1 + g2 P2).
  auto only = [&](double ca, double cb, double pa, double pb) {
    const double ymax = cb / pb;
    if (ymax <= 0.0) return 0.0;
    return finite([&](double y) { return std::exp(-y) * std::exp(-ca * (1.0 + y * pb) / pa); }, 0.0,
                  ymax);
  };
  out.first_only = only(c1, c2, power1, power2);
  out.second_only = only(c2, c1, power2, power1);
  return out;
}

double joint_symmetric(double pbar, double s) {
  const double rate = std::log1p(pbar * s);
  if (rate == 0.0) return 0.0;
  const JointRegions r = joint_regions(rate, rate, pbar, pbar);
  return rate * (r.first_only + r.second_only + 2.0 * r.both);
}

double alo_throughput(double pbar, double s) {
  const double p = max_ccdf(2, s);
  if (p <= 0.0) return 0.0;
  const double rate = std::log1p(2.0 * pbar * s / p);
  // In every attempt-index state the stronger user clears s with probability
  // p and its packet is then decoded, so each slot pays p R whatever the
  // state distribution is.
  return p * rate;
}

GridMax dense_1d(const std::function<double(double)>& f, long coarse_points, long fine_points) {
  const GridMax coarse = grid_max(f, 1e-6, 60.0, coarse_points, true);
  const double ratio = std::pow(60.0 / 1e-6, 1.0 / static_cast<double>(coarse_points - 1));
  return grid_max(f, coarse.argmax / ratio, coarse.argmax * ratio, fine_points);
}

}  // namespace harqmac::oracle
