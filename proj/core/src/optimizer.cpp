#include "harqmac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"

namespace harqmac {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1/phi
constexpr std::uint64_t kRestartSeed = 0x6e656c6465726d64ULL;

double checked(const Objective1D& f, double x) {
  const double value = f(x);
  if (!std::isfinite(value)) {
    throw EvaluationError(fmt::format("objective is not finite at {}", x), x);
  }
  return value;
}

double checked(const ObjectiveND& f, std::span<const double> x) {
  const double value = f(x);
  if (!std::isfinite(value)) {
    throw EvaluationError(fmt::format("objective is not finite at [{}]", fmt::join(x, ", ")),
                          x.empty() ? 0.0 : x.front());
  }
  return value;
}

struct Vertex {
  std::vector<double> x;
  double value;
};

// Minimizes -f from `start`; keeps the best vertex seen.
Vertex nelder_mead(const ObjectiveND& f, std::vector<double> start, std::span<const double> step,
                   const OptimizerConfig& config, long& evaluations) {
  const std::size_t n = start.size();
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return -checked(f, x);
  };

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start;
    x[i] += step[i];
    simplex.push_back({x, eval(x)});
  }

  std::vector<double> centroid(n), trial(n), trial2(n);
  auto blend = [&](double t, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
  };

  for (int iter = 0; iter < config.nd_max_iters; ++iter) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.value < b.value; });

    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::abs(simplex[i].x[j] - simplex[0].x[j]));
      }
    }
    double scale = 1.0;
    for (double v : simplex[0].x) scale = std::max(scale, std::abs(v));
    if (diameter <= config.refine_tol * scale) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(n);
    }
    Vertex& worst = simplex[n];

    blend(-1.0, worst.x, trial);
    const double reflected = eval(trial);
    if (reflected < simplex[0].value) {
      blend(-2.0, worst.x, trial2);
      const double expanded = eval(trial2);
      if (expanded < reflected) {
        worst = {trial2, expanded};
      } else {
        worst = {trial, reflected};
      }
      continue;
    }
    if (reflected < simplex[n - 1].value) {
      worst = {trial, reflected};
      continue;
    }
    const bool outside = reflected < worst.value;
    blend(outside ? -0.5 : 0.5, worst.x, trial2);
    const double contracted = eval(trial2);
    if (contracted < std::min(reflected, worst.value)) {
      worst = {trial2, contracted};
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
      }
      simplex[i].value = eval(simplex[i].x);
    }
  }
  const auto best = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  return *best;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (grid_points < 2 || !(refine_tol > 0.0) || nd_restarts < 1 || nd_max_iters < 1) {
    throw ConfigError("OptimizerConfig: grid_points >= 2 and all other fields must be > 0");
  }
}

Maximum1D maximize_1d(const Objective1D& f, double lo, double hi, const OptimizerConfig& config) {
  config.validate();
  if (!(lo < hi)) throw ConfigError(fmt::format("maximize_1d: empty domain ({}, {})", lo, hi));

  const int n = config.grid_points;
  const bool log_grid = lo > 0.0 && hi / lo >= 10.0;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    grid[i] = log_grid ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  grid.back() = hi;

  int best = 0;
  double best_value = checked(f, grid[0]);
  for (int i = 1; i < n; ++i) {
    const double value = checked(f, grid[i]);
    if (value > best_value) {
      best = i;
      best_value = value;
    }
  }

  Maximum1D result{grid[best], best_value};
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, n - 1)];
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = checked(f, c);
  double fd = checked(f, d);
  auto consider = [&](double x, double value) {
    if (value > result.value) result = {x, value};
  };
  consider(c, fc);
  consider(d, fd);
  while (b - a > config.refine_tol * std::max(1.0, std::abs(c))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = checked(f, c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = checked(f, d);
      consider(d, fd);
    }
  }
  return result;
}

MaximumND maximize_nd(const ObjectiveND& f, std::span<const double> lower,
                      std::span<const double> upper, const OptimizerConfig& config,
                      std::span<const std::vector<double>> extra_starts) {
  config.validate();
  const std::size_t dim = lower.size();
  if (dim == 0 || upper.size() != dim) {
    throw ConfigError("maximize_nd: box bounds must be non-empty and of equal dimension");
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (!(lower[j] <= upper[j])) throw ConfigError("maximize_nd: lower bound exceeds upper bound");
  }

  std::vector<double> step(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double width = upper[j] - lower[j];
    step[j] = width > 0.0 ? 0.1 * width : 0.1;
  }

  // Latin hypercube: each coordinate visits every stratum exactly once.
  const int restarts = config.nd_restarts;
  Rng rng(kRestartSeed, dim);
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(restarts), std::vector<double>(dim));
  std::vector<int> strata(static_cast<std::size_t>(restarts));
  for (std::size_t j = 0; j < dim; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    for (int i = restarts - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(strata[i], strata[k]);
    }
    for (int i = 0; i < restarts; ++i) {
      const double t = (strata[i] + rng.uniform()) / restarts;
      starts[i][j] = lower[j] + t * (upper[j] - lower[j]);
    }
  }
  for (const auto& extra : extra_starts) {
    if (extra.size() != dim) throw ConfigError("maximize_nd: extra start has wrong dimension");
    starts.push_back(extra);
  }

  MaximumND result;
  result.value = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    Vertex best = nelder_mead(f, start, step, config, result.evaluations);
    // Polish with a fresh, smaller simplex; collapsed simplices stall otherwise.
    std::vector<double> small(dim);
    for (std::size_t j = 0; j < dim; ++j) small[j] = 0.01 * step[j];
    Vertex polished = nelder_mead(f, best.x, small, config, result.evaluations);
    if (polished.value < best.value) best = std::move(polished);
    if (-best.value > result.value) {
      result.value = -best.value;
      result.argmax = std::move(best.x);
    }
  }
  return result;
}

}  // namespace harqmac
