#pragma once

#include <functional>
#include <span>
#include <vector>

namespace harqmac {

struct OptimizerConfig {
  int grid_points = 400;     ///< coarse scan size for maximize_1d
  double refine_tol = 1e-9;  ///< argument tolerance of the local refinement
  int nd_restarts = 8;       ///< Latin-hypercube starts for maximize_nd
  int nd_max_iters = 2000;   ///< Nelder-Mead iterations per start

  /// Throws ConfigError unless every field is strictly positive.
  void validate() const;
};

struct Maximum1D {
  double argmax = 0.0;
  double value = 0.0;
};

struct MaximumND {
  std::vector<double> argmax;
  double value = 0.0;
  long evaluations = 0;
};

using Objective1D = std::function<double(double)>;
using ObjectiveND = std::function<double(std::span<const double>)>;

/// Maximizes f on [lo, hi]: a coarse scan (log-spaced when lo > 0 and the
/// domain spans at least a decade, linear otherwise) followed by golden-section
/// search inside the bracket around the best grid point. Grid ties go to the
/// smaller argument. The result is never below the best grid sample.
/// Throws EvaluationError carrying the argument if f returns a non-finite value.
Maximum1D maximize_1d(const Objective1D& f, double lo, double hi,
                      const OptimizerConfig& config = {});

/// Nelder-Mead from nd_restarts Latin-hypercube starts inside the box
/// [lower, upper] plus any `extra_starts`; the box only seeds the starts, the
/// search itself is unconstrained. Deterministic (fixed restart seed).
MaximumND maximize_nd(const ObjectiveND& f, std::span<const double> lower,
                      std::span<const double> upper, const OptimizerConfig& config = {},
                      std::span<const std::vector<double>> extra_starts = {});

}  // namespace harqmac
