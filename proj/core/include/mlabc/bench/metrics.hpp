#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mlabc/mlmc/lattice.hpp"

namespace mlabc::bench {

/// max over nodes of |a - b|. Throws InvalidArgument on a lattice mismatch.
double sup_distance(const LatticeCdf& a, const LatticeCdf& b);

/// sqrt(mean over estimates of sup_distance(estimate, reference)^2).
double rmse_linf(std::span<const LatticeCdf> estimates, const LatticeCdf& reference);
/// Same, from precomputed sup-norm errors.
double rmse_from_errors(std::span<const double> sup_errors);

/// Mean over replications of sup_distance(coupled_r, uncoupled_r).
double coupling_bias(std::span<const LatticeCdf> coupled, std::span<const LatticeCdf> uncoupled);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log rmse at log cost 0
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_defined = false;  // false for two points
  std::size_t points = 0;
};

/// Least-squares fit of log rmse against log cost with a 95% t-interval for
/// the slope. Needs at least two points with positive values and two
/// distinct costs.
SlopeFit fit_convergence_slope(std::span<const std::pair<double, double>> cost_rmse);

}  // namespace mlabc::bench
