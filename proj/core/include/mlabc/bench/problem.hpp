#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/abc/prior.hpp"
#include "mlabc/bench/config.hpp"
#include "mlabc/mlmc/lattice.hpp"
#include "mlabc/models/sis.hpp"
#include "mlabc/models/tb.hpp"
#include "mlabc/samplers/kernel.hpp"

namespace mlabc::bench {

/// Model, prior, data and lattice of an experiment.
struct Problem {
  std::string model_id;
  Prior prior;
  std::shared_ptr<const AbcModel> model;
  Lattice lattice;
  std::vector<std::string> names;
  std::vector<double> thresholds;
  std::optional<TimeSeriesData> sis_data;
  std::optional<ClusterData> tb_data;
  int sis_s0 = 100;
  int sis_n_pop = 101;
};

/// Relative data paths are resolved against `base_dir`.
Problem build_problem(const ExperimentConfig& config, const std::filesystem::path& base_dir = {});

/// The seed-`data_seed` SIS trajectory at t = 4, 8, ..., 40 with
/// (beta, gamma) = (0.003, 0.1).
TimeSeriesData sis_builtin_data(int s0, int i0, std::uint64_t data_seed);

/// SIS: the prior box. TB: alpha, delta in [0, 5], mu in [-0.1, 0.5].
std::vector<LatticeAxis> default_lattice_axes(const std::string& model_id, std::size_t nodes);

GaussianKernel make_kernel(const ExperimentConfig& config);

/// SIS with kind exact/auto: the exact posterior by quadrature. Otherwise
/// reference.samples rejection draws at the reference threshold with
/// reference.seed. When reference.file is set and exists it is loaded
/// instead, and a freshly built reference is written there (rejection
/// references also keep their draws in reference_samples_path(file)).
LatticeCdf build_reference(const ExperimentConfig& config, const Problem& problem,
                           const std::filesystem::path& base_dir = {});

std::filesystem::path reference_samples_path(const std::filesystem::path& cache);

}  // namespace mlabc::bench
