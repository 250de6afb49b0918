#include "mlabc/mlmc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mlabc/error.hpp"

namespace mlabc {

void validate_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigError("threshold schedule is empty");
  for (std::size_t l = 0; l < thresholds.size(); ++l) {
    if (!(thresholds[l] > 0.0)) throw ConfigError("thresholds must be positive");
    if (l > 0 && !(thresholds[l] < thresholds[l - 1])) {
      throw ConfigError("thresholds must be strictly decreasing (level " + std::to_string(l + 1) + ")");
    }
  }
}

void LevelPlan::validate() const {
  validate_thresholds(thresholds);
  const std::size_t L = thresholds.size();
  if (!allocations.empty()) {
    if (allocations.size() != L) throw InvalidArgument("LevelPlan: one allocation per level required");
    for (auto n : allocations) {
      if (n < 1) throw InvalidArgument("LevelPlan: allocations must be >= 1");
    }
  }
  if (!variances.empty() && variances.size() != L) throw InvalidArgument("LevelPlan: variance count");
  for (double v : variances) {
    if (!(v >= 0.0)) throw InvalidArgument("LevelPlan: variances must be >= 0");
  }
  if (!costs.empty() && costs.size() != L) throw InvalidArgument("LevelPlan: cost count");
  for (double c : costs) {
    if (!(c >= 1.0)) throw InvalidArgument("LevelPlan: costs must be >= 1");
  }
}

std::vector<double> optimal_allocation_real(const std::vector<double>& variances,
                                            const std::vector<double>& costs, double h) {
  if (variances.size() != costs.size() || variances.empty()) {
    throw InvalidArgument("optimal_allocation: need one variance and one cost per level");
  }
  if (!(h > 0.0)) throw InvalidArgument("optimal_allocation: h must be > 0");
  double sum = 0.0;
  bool any_positive = false;
  for (std::size_t l = 0; l < variances.size(); ++l) {
    if (!(costs[l] > 0.0)) throw InvalidArgument("optimal_allocation: costs must be > 0");
    if (!(variances[l] >= 0.0)) throw InvalidArgument("optimal_allocation: variances must be >= 0");
    any_positive = any_positive || variances[l] > 0.0;
    sum += std::sqrt(variances[l] * costs[l]);
  }
  if (!any_positive) throw InvalidArgument("optimal_allocation: all level variances are zero");
  std::vector<double> n(variances.size());
  for (std::size_t l = 0; l < n.size(); ++l) {
    n[l] = std::sqrt(variances[l] / costs[l]) * sum / (h * h);
  }
  return n;
}

std::vector<std::size_t> optimal_allocation(const LevelPlan& stats, double h,
                                            const AllocationOptions& options) {
  std::vector<double> n = optimal_allocation_real(stats.variances, stats.costs, h);
  if (options.finest_samples) {
    if (!(n.back() > 0.0)) {
      throw InvalidArgument("optimal_allocation: cannot rescale, finest level variance is zero");
    }
    const double scale = static_cast<double>(*options.finest_samples) / n.back();
    for (double& x : n) x *= scale;
    n.back() = static_cast<double>(*options.finest_samples);
  }
  std::vector<std::size_t> out(n.size());
  for (std::size_t l = 0; l < n.size(); ++l) {
    // Guard against 8.0000000001 from rounding in the products above.
    const double r = std::round(n[l]);
    const double x = std::abs(n[l] - r) < 1e-9 * std::max(1.0, r) ? r : std::ceil(n[l]);
    out[l] = std::max({options.min_samples, std::size_t{1}, static_cast<std::size_t>(x)});
  }
  return out;
}

}  // namespace mlabc
