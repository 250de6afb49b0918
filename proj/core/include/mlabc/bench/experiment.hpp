#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlabc/bench/config.hpp"
#include "mlabc/bench/csv.hpp"
#include "mlabc/bench/problem.hpp"
#include "mlabc/mlmc/allocation.hpp"
#include "mlabc/mlmc/lattice.hpp"

namespace mlabc::bench {

/// One replication of one sampler.
struct ReplicationResult {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::string sampler;
  bool ok = false;
  std::string error;
  /// N_s: every simulation the replication ran, equal to the sum of
  /// stage_costs (levels, SMC stages, or MCMC init + chain).
  std::uint64_t n_s = 0;
  std::vector<std::uint64_t> stage_costs;
  double sup_error = 0.0;  // NaN without a reference
  double wall_seconds = 0.0;
  LatticeCdf estimate;
  // accepted / final samples; `level` is the MLMC level (1 otherwise)
  std::vector<ParameterVector> samples;
  std::vector<std::size_t> levels;
  std::vector<double> weights;
  std::vector<double> discrepancies;
  std::vector<std::string> invariant_violations;  // SMC
};

struct RunReport {
  std::string name;
  std::string sampler;
  std::vector<ReplicationResult> replications;
  std::optional<LevelPlan> plan;  // MLMC
  double rmse = 0.0;              // over successful replications; NaN without a reference
  double mean_n_s = 0.0;
  std::size_t failures = 0;
};

std::uint64_t replication_seed(std::uint64_t master, std::size_t replication);

/// MLMC thresholds and allocations: explicit allocations, or a trial run
/// with mlmc.trial_samples per level and seed mlmc.trial_seed followed by the
/// optimal allocation for mlmc.target_rmse (or rescaled so N_L = samples).
LevelPlan plan_mlmc(const ExperimentConfig& config, const Problem& problem);

/// Runs one replication with the given sub-seed. Errors are caught and
/// recorded in the result.
ReplicationResult run_replication(const ExperimentConfig& config, const Problem& problem,
                                  const std::optional<LevelPlan>& plan,
                                  const std::optional<LatticeCdf>& reference,
                                  std::size_t replication, std::uint64_t seed, unsigned workers);

/// Runs every replication and writes config.txt, report.csv, samples.csv,
/// cdf.csv, marginals.csv (plus plan.csv, reference.csv and timing.csv
/// when they apply) into `out_dir`. All files except timing.csv are
/// deterministic given the config. Without `reference`, one is built unless
/// reference.kind is none.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const std::filesystem::path& base_dir = {},
                         std::optional<LatticeCdf> reference = std::nullopt);

/// name, sampler, replication, seed, status, n_s, sup_error, error
CsvTable report_table(const RunReport& report);
CsvTable plan_table(const LevelPlan& plan);

/// Collects every report.csv under `dir` into one row per experiment:
/// name, sampler, replications, failures, mean_n_s, rmse.
CsvTable aggregate_reports(const std::filesystem::path& dir);

}  // namespace mlabc::bench
