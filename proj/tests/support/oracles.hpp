#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the library under test.

#include <cstdint>
#include <functional>
#include <vector>

namespace harqmac::oracle {

/// E1(x) by double-exponential quadrature of e^{-x} int_0^inf e^{-u}/(x+u) du.
double e1_quadrature(double x);

/// Mean and 3-sigma half-width of a Monte Carlo average.
struct McEstimate {
  double mean = 0.0;
  double halfwidth = 0.0;
};

/// Water-filling quantities at several water levels x from one set of draws of
/// G = max of `users` unit exponentials: E[ln(G/x) 1{G >= x}] and
/// E[(1/x - 1/G)^+].
struct WaterFillingMc {
  McEstimate capacity;
  McEstimate power;
};
std::vector<WaterFillingMc> water_filling_mc(int users, const std::vector<double>& levels,
                                             std::int64_t draws, std::uint64_t seed);

struct GridMax {
  double argmax = 0.0;
  double value = 0.0;
};

/// Exhaustive scan of f on `points` equally spaced nodes of [lo, hi] (log
/// spaced when `log_spaced`).
GridMax grid_max(const std::function<double(double)>& f, double lo, double hi, long points,
                 bool log_spaced = false);

struct GridMaxN {
  std::vector<double> argmax;
  double value = 0.0;
};

/// Tensor grid over the box followed by `rounds` zooms that shrink the box to
/// two cells around the incumbent.
GridMaxN zoom_grid_max(const std::function<double(const std::vector<double>&)>& f,
                       std::vector<double> lower, std::vector<double> upper, int points_per_dim,
                       int rounds);

/// Stationary vector by repeated multiplication pi <- pi P from the uniform
/// vector until the L1 change is below `tol`.
std::vector<double> power_iteration(const std::vector<std::vector<double>>& transition,
                                    double tol = 1e-15, long max_iters = 10'000'000);

// Policy objectives written from their definitions (unit-mean Rayleigh gains).

double max_ccdf(int users, double x);                     ///< 1 - (1 - e^{-x})^K
double static_tdma(int users, double pbar, double s);      ///< e^{-s} ln(1 + s K pbar)
double cdtdma_on(int users, double pbar, double s);
double cdtdma_onoff(int users, double pbar, double s);
/// Rate set by the power constraint, throughput R Pr[max >= s_1].
double multilevel(int users, double pbar, const std::vector<double>& thresholds);

/// Two-user joint-decoding success probabilities by one-dimensional
/// quadrature after integrating the inner exponential in closed form.
struct JointRegions {
  double both = 0.0;
  double first_only = 0.0;
  double second_only = 0.0;
};
JointRegions joint_regions(double rate1, double rate2, double power1, double power2);

/// Symmetric joint-decoding throughput R (P10 + P01 + 2 P11), R = ln(1 + pbar s).
double joint_symmetric(double pbar, double s);

/// Two-user ALO throughput from the per-slot reward of the attempt-index chain.
double alo_throughput(double pbar, double s);

/// Optimum of a 1-D objective on a dense log grid over [1e-6, 60] followed
/// by a fine linear rescan of the bracketing cells.
GridMax dense_1d(const std::function<double(double)>& f, long coarse_points = 200'001,
                 long fine_points = 20'001);

}  // namespace harqmac::oracle
