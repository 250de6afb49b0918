#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/abc/prior.hpp"
#include "mlabc/abc/rejection.hpp"
#include "mlabc/mlmc/allocation.hpp"
#include "mlabc/mlmc/coupling.hpp"
#include "mlabc/mlmc/lattice.hpp"

namespace mlabc {

struct MlmcOptions {
  unsigned workers = 0;
  std::uint64_t budget_cap = 1'000'000'000;  // over all levels
  /// Propose level l > 1 from the prior truncated to the bounding box of the
  /// level l-1 samples.
  bool truncate_prior = true;
  CouplingMode coupling = CouplingMode::MarginalMatching;
};

struct LevelReport {
  std::size_t level = 0;  // 1-based
  double threshold = 0.0;
  std::size_t samples = 0;
  std::uint64_t simulations = 0;  // d_l, including uncoupled partner draws
  std::optional<BoundingBox> proposal_box;
  std::size_t out_of_range = 0;
  double correction_sup = 0.0;  // sup-norm of the level-l term of the sum
};

struct MlmcResult {
  LatticeCdf cdf;  // monotonicity-adjusted
  std::vector<LevelReport> levels;
  CostCounter cost;
  std::vector<SampleSet> level_samples;
  std::vector<std::vector<ParameterVector>> matched;  // empty for level 1
};

/// Multilevel ABC estimate of the posterior CDF at threshold eps_L on the
/// lattice. Level l accepts N_l samples by rejection (sub-stream
/// derive_seed(seed, {l})), couples them to level l-1, and adds the paired
/// difference of smoothed eCDFs to the running estimate, which is
/// monotonicity-adjusted after every level.
MlmcResult mlmc_abc_cdf(const Prior& prior, const AbcModel& model,
                        const std::vector<double>& thresholds,
                        const std::vector<std::size_t>& allocations, const Lattice& lattice,
                        std::uint64_t seed, const MlmcOptions& options = {});

/// Low accuracy pilot run with c samples at every level. v_1 is the largest
/// per-node variance of the smoothed indicator, v_l (l > 1) the largest
/// per-node variance of the paired differences, and c_l = d_l / c.
LevelPlan trial_run(const Prior& prior, const AbcModel& model,
                    const std::vector<double>& thresholds, const Lattice& lattice,
                    std::size_t c, std::uint64_t seed, const MlmcOptions& options = {});

struct ExpectationResult {
  double estimate = 0.0;
  std::vector<double> terms;           // P_l
  std::vector<double> term_variances;  // per-sample variance of each term
  std::vector<LevelReport> levels;
  CostCounter cost;

  /// Estimated standard error of the estimate.
  double standard_error() const;
};

/// Multilevel estimate of E[U(theta) | d <= eps_L]. Only per-axis marginal
/// CDFs on `axes` are kept, which is all the coupling needs.
ExpectationResult mlmc_abc_expectation(const std::function<double(const ParameterVector&)>& u,
                                       const Prior& prior, const AbcModel& model,
                                       const std::vector<double>& thresholds,
                                       const std::vector<std::size_t>& allocations,
                                       const std::vector<LatticeAxis>& axes, std::uint64_t seed,
                                       const MlmcOptions& options = {});

}  // namespace mlabc
