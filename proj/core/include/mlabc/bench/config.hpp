#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlabc/bench/schedule.hpp"
#include "mlabc/mlmc/coupling.hpp"

namespace mlabc::bench {

/// Everything needed to rerun an experiment. See docs/config.md for the
/// key reference; `to_text` writes the same keys back.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string model = "sis";        // sis | tb
  std::string sampler = "rejection";  // rejection | mlmc | mcmc | smc
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  /// Runs the single replication with this sub-seed (as recorded in
  /// report.csv) instead of deriving sub-seeds from `seed`.
  std::optional<std::uint64_t> replication_seed;
  unsigned workers = 0;
  std::uint64_t budget_cap = 1'000'000'000;
  /// N for rejection, N_T for mcmc, N_P for smc, N_L for mlmc with
  /// mlmc.scale_to_finest.
  std::size_t samples = 1000;
  ScheduleSpec schedule;

  // lattice; empty means the model default
  std::vector<std::size_t> lattice_nodes;
  std::vector<double> lattice_lo;
  std::vector<double> lattice_hi;

  // mlmc
  std::vector<std::size_t> allocations;  // explicit N_l; skips the trial run
  std::optional<double> target_rmse;     // h in the allocation formula
  bool scale_to_finest = false;          // rescale so that N_L == samples
  std::size_t trial_samples = 100;
  std::size_t min_samples = 10;
  std::uint64_t trial_seed = 99;
  CouplingMode coupling = CouplingMode::MarginalMatching;
  bool truncate_prior = true;

  // mcmc / smc
  std::string kernel = "naive";          // naive | tuned | custom
  std::vector<std::vector<double>> kernel_covariance;  // for custom
  std::size_t burn_in = 0;

  // data
  std::string data_file;   // empty: built-in data
  int sis_s0 = 100;
  int sis_i0 = 1;
  std::uint64_t sis_data_seed = 1;
  std::int64_t tb_max_infections = 10'000;
  int tb_subsample = 473;

  // reference
  std::string reference_kind = "auto";  // auto | exact | rejection | none
  std::size_t reference_samples = 10'000;
  std::uint64_t reference_seed = 20170811;
  std::optional<double> reference_threshold;  // default: last threshold
  std::string reference_file;  // cache; loaded when present, written otherwise
  std::size_t quadrature_fine_points = 300;
  std::size_t quadrature_scan_points = 48;
  double quadrature_tolerance = 1e-10;

  bool write_samples = true;

  /// Throws ConfigError describing the first inconsistency.
  void validate() const;
  std::string to_text() const;
};

/// key = value lines; '#' starts a comment; [section] prefixes later keys
/// with "section.".
std::map<std::string, std::string> parse_flat_text(const std::string& text);
/// Nested objects flatten to dotted keys; arrays become comma lists.
std::map<std::string, std::string> parse_flat_json(const std::string& text);

/// Unknown keys are errors.
ExperimentConfig config_from_map(const std::map<std::string, std::string>& values,
                                 ExperimentConfig base = {});
ExperimentConfig parse_config(const std::string& text);  // JSON if it starts with '{'
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mlabc::bench
