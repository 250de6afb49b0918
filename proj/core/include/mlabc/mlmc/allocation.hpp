#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace mlabc {

/// Thresholds and sample numbers of a multilevel run, plus the trial
/// statistics the allocation was derived from.
struct LevelPlan {
  std::vector<double> thresholds;          // eps_1 > ... > eps_L > 0
  std::vector<std::size_t> allocations;    // N_l
  std::vector<double> variances;           // v_l
  std::vector<double> costs;               // c_l: simulations per accepted sample
  std::vector<std::uint64_t> tallies;      // d_l: simulations spent in the trial

  std::size_t levels() const noexcept { return thresholds.size(); }
  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;
};

/// Throws ConfigError unless the thresholds are positive and strictly decreasing.
void validate_thresholds(const std::vector<double>& thresholds);

struct AllocationOptions {
  std::size_t min_samples = 10;
  /// When set, all levels are scaled by the same factor so that N_L equals it.
  std::optional<std::size_t> finest_samples;
};

/// Continuous minimiser of sum v_l / N_l for a fixed total cost sum N_l c_l:
///   N_l = h^-2 sqrt(v_l / c_l) sum_m sqrt(v_m c_m).
std::vector<double> optimal_allocation_real(const std::vector<double>& variances,
                                            const std::vector<double>& costs, double h);

/// Integer allocation: ceiling of the continuous one (after optional
/// rescaling), floored at options.min_samples. Throws InvalidArgument when
/// every variance is zero.
std::vector<std::size_t> optimal_allocation(const LevelPlan& stats, double h,
                                            const AllocationOptions& options = {});

}  // namespace mlabc
