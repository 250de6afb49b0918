#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlabc/abc/rejection.hpp"
#include "mlabc/bench/config.hpp"
#include "mlabc/bench/experiment.hpp"
#include "mlabc/bench/metrics.hpp"
#include "mlabc/mlmc/allocation.hpp"

namespace mlabc::bench {

// ---- RMSE against cost for rejection and MLMC (SIS) ----

struct ConvergenceStudy {
  ExperimentConfig base;  // model, lattice, reference, workers
  std::vector<double> rejection_thresholds{75.0, 53.033008588991066, 37.5, 26.516504294495533};
  std::vector<std::size_t> rejection_samples{34, 138, 550, 2200};
  double mlmc_first = 75.0;
  double mlmc_ratio = 2.0;
  std::size_t mlmc_max_levels = 3;
  /// Target RMSE of the L-level run is kappa * eps_L.
  double kappa = 0.001;
  std::size_t trial_samples = 100;
  std::uint64_t trial_seed = 99;
  std::size_t replications = 20;
  std::uint64_t seed = 1;
};

struct ConvergencePoint {
  std::string sampler;
  std::size_t index = 0;  // rung for rejection, L for MLMC
  std::vector<double> thresholds;
  std::vector<std::size_t> allocations;
  double mean_cost = 0.0;
  double rmse = 0.0;
  std::vector<double> errors;  // per replication
  std::vector<std::uint64_t> costs;
  std::vector<std::uint64_t> seeds;
  std::size_t failures = 0;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> rejection;
  std::vector<ConvergencePoint> mlmc;
  SlopeFit rejection_slope;
  SlopeFit mlmc_slope;
  LevelPlan trial;  // shared by every MLMC point
};

/// Writes points.csv, slopes.csv, trial.csv and one experiment directory per
/// point under out_dir.
ConvergenceResult run_convergence_study(const ConvergenceStudy& study, const std::filesystem::path& out_dir,
                                        std::optional<LatticeCdf> reference = std::nullopt);

// ---- coupling bias against the threshold ratio m (SIS) ----

struct BiasStudy {
  ExperimentConfig base;
  double finest = 56.25;  // eps_2; eps_1 = m * eps_2
  std::vector<double> factors{4.0, 3.0, 2.0, 1.5};
  std::size_t samples = 10'000;  // per level
  std::size_t replications = 10;
  std::uint64_t seed = 1;
};

/// Two-level estimators from the same level draws: `coupled` matches the
/// fine samples to the coarse level through the marginal CDFs, `uncoupled`
/// uses the independent coarse draws instead. Equal to mlmc_abc_cdf without
/// prior truncation and with MarginalMatching or Independent coupling.
/// The *_sum members are the same telescoping sums before the final
/// monotonicity adjustment.
struct TwoLevelEstimates {
  LatticeCdf coupled;
  LatticeCdf uncoupled;
  LatticeCdf coupled_sum;
  LatticeCdf uncoupled_sum;
};
TwoLevelEstimates two_level_estimates(const SampleSet& coarse, const SampleSet& fine,
                                      const SampleSet& coarse_partners, const Lattice& lattice);

struct BiasRow {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double factor = 0.0;
  double bias = 0.0;           // sup |F^c - F^u| before the final adjustment
  double bias_adjusted = 0.0;  // the same after it
  double abc_error = 0.0;      // sup |F^c - F_exact|
  std::uint64_t cost = 0;
};

struct BiasResult {
  std::vector<BiasRow> rows;
  std::vector<double> median_bias;       // per factor
  std::vector<double> median_abc_error;  // per factor
};

/// Replication r uses seed s_r = derive_seed(seed, {r}); the fine level is
/// drawn once per replication and shared by all factors. The bias compares
/// the telescoping sums before the last monotonicity adjustment: the
/// adjustment clips both estimators wherever they leave [0, 1], which hides
/// the coupling difference below the Monte Carlo noise. Writes bias.csv and
/// bias_summary.csv.
BiasResult run_bias_study(const BiasStudy& study, const std::filesystem::path& out_dir,
                          std::optional<LatticeCdf> reference = std::nullopt);

// ---- MLMC against MCMC and SMC at matched cost (TB) ----

struct ParityStudy {
  ExperimentConfig base;  // tb model, kernel, schedule, lattice, reference
  std::vector<std::size_t> finest_samples{50};  // N_L values
  std::size_t smc_particles = 100;
  bool run_smc = true;
  std::size_t replications = 10;
  std::uint64_t seed = 1;
  double cost_tolerance = 0.10;  // MCMC N_s within this fraction of MLMC's
};

struct ParityRow {
  std::size_t finest = 0;
  std::size_t replication = 0;
  std::string sampler;
  std::uint64_t seed = 0;
  std::size_t samples = 0;  // N_L, N_T or N_P
  std::uint64_t n_s = 0;
  double sup_error = 0.0;
  bool ok = false;
  std::string error;
  std::vector<std::string> invariant_violations;
};

struct ParityResult {
  std::vector<ParityRow> rows;
  std::vector<LevelPlan> plans;  // per finest_samples entry
};

/// The MLMC trial run happens once per N_L and is not part of any row's
/// N_s. MCMC N_T is chosen per replication so that its N_s lands within
/// cost_tolerance of the paired MLMC run. Writes parity.csv and plans.
ParityResult run_parity_study(const ParityStudy& study, const std::filesystem::path& out_dir,
                              std::optional<LatticeCdf> reference = std::nullopt);

/// Number of seeds in which MLMC's sup error is at most MCMC's, per N_L.
std::vector<std::pair<std::size_t, std::size_t>> parity_wins(const ParityResult& result);

// ---- named desk-scale setups ----

struct Preset {
  std::string name;
  std::string description;
};
std::vector<Preset> presets();

/// Runs a preset into out_dir. `overrides` (seed, workers, budget cap) are
/// applied on top of the preset's base config.
void run_preset(const std::string& name, const std::filesystem::path& out_dir,
                const std::optional<std::uint64_t>& seed, const std::optional<unsigned>& workers,
                const std::optional<std::uint64_t>& budget_cap);

/// Base configs used by the presets.
ExperimentConfig sis_base_config();
ExperimentConfig tb_base_config();
ConvergenceStudy fig1_study();
BiasStudy fig2_study();
ParityStudy table_study(const std::string& kernel);

}  // namespace mlabc::bench
