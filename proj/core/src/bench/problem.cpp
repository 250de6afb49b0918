#include "mlabc/bench/problem.hpp"

#include "mlabc/abc/rejection.hpp"
#include "mlabc/bench/csv.hpp"
#include "mlabc/bench/schedule.hpp"
#include "mlabc/error.hpp"
#include "mlabc/logging.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/models/sis_posterior.hpp"

namespace mlabc::bench {
namespace {

std::filesystem::path resolve(const std::string& path, const std::filesystem::path& base) {
  std::filesystem::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

TimeSeriesData sis_builtin_data(int s0, int i0, std::uint64_t data_seed) {
  Rng rng(data_seed);
  return sis_simulate({0.003, 0.1}, s0, i0, sis_default_observation_times(), rng);
}

std::vector<LatticeAxis> default_lattice_axes(const std::string& model_id, std::size_t nodes) {
  if (model_id == "sis") return {{0.0, 0.06, nodes}, {0.0, 2.0, nodes}};
  if (model_id == "tb") return {{0.0, 5.0, nodes}, {0.0, 5.0, nodes}, {-0.1, 0.5, nodes}};
  throw ConfigError("unknown model '" + model_id + "'");
}

Problem build_problem(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  config.validate();
  Problem p{config.model, config.model == "sis" ? Prior::sis_default() : Prior::tb_default(),
            nullptr, {}, {}, expand_schedule(config.schedule), {}, {}, config.sis_s0,
            config.sis_s0 + config.sis_i0};
  p.names = p.prior.names();
  if (config.model == "sis") {
    p.sis_data = config.data_file.empty()
                     ? sis_builtin_data(config.sis_s0, config.sis_i0, config.sis_data_seed)
                     : load_time_series_csv(resolve(config.data_file, base_dir));
    p.model = std::make_shared<SisAbcModel>(*p.sis_data, config.sis_s0, config.sis_i0);
  } else {
    p.tb_data = config.data_file.empty() ? tb_observed_data()
                                         : load_cluster_csv(resolve(config.data_file, base_dir));
    TbSimulationOptions opts;
    opts.max_infections = config.tb_max_infections;
    opts.subsample_n = config.tb_subsample;
    p.model = std::make_shared<TbAbcModel>(*p.tb_data, opts);
  }
  const std::size_t k = p.prior.dimension();
  const std::size_t default_nodes = config.model == "sis" ? 100 : 40;
  auto axes = default_lattice_axes(config.model, default_nodes);
  for (std::size_t j = 0; j < k; ++j) {
    if (config.lattice_nodes.size() == 1) axes[j].nodes = config.lattice_nodes[0];
    if (config.lattice_nodes.size() == k) axes[j].nodes = config.lattice_nodes[j];
    if (!config.lattice_lo.empty()) axes[j].lo = config.lattice_lo[j];
    if (!config.lattice_hi.empty()) axes[j].hi = config.lattice_hi[j];
    if (!(axes[j].lo < axes[j].hi)) throw ConfigError("lattice: empty range on axis " + p.names[j]);
  }
  p.lattice = Lattice(std::move(axes));
  return p;
}

GaussianKernel make_kernel(const ExperimentConfig& config) {
  if (config.kernel == "naive") return GaussianKernel::tb_naive();
  if (config.kernel == "tuned") return GaussianKernel::tb_tuned();
  const std::size_t k = config.kernel_covariance.size();
  Eigen::MatrixXd cov(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) cov(i, j) = config.kernel_covariance[i][j];
  }
  return GaussianKernel(cov);
}

std::filesystem::path reference_samples_path(const std::filesystem::path& cache) {
  std::filesystem::path p = cache;
  p.replace_extension(".samples.csv");
  return p;
}

LatticeCdf build_reference(const ExperimentConfig& config, const Problem& problem,
                           const std::filesystem::path& base_dir) {
  if (config.reference_kind == "none") throw ConfigError("reference.kind is none");
  std::filesystem::path cache;
  if (!config.reference_file.empty()) {
    cache = resolve(config.reference_file, base_dir);
    if (std::filesystem::exists(cache)) {
      LatticeCdf ref = load_lattice_cdf(cache);
      if (!(ref.lattice == problem.lattice)) {
        throw ConfigError("cached reference " + cache.string() + " is on a different lattice");
      }
      ref.adjusted = true;
      return ref;
    }
  }
  LatticeCdf ref;
  const bool exact = config.reference_kind == "exact" ||
                     (config.reference_kind == "auto" && problem.model_id == "sis");
  if (exact) {
    QuadratureOptions q;
    q.scan_points = config.quadrature_scan_points;
    q.fine_points = config.quadrature_fine_points;
    q.tolerance = config.quadrature_tolerance;
    q.workers = config.workers;
    ref = sis_exact_posterior_cdf(*problem.sis_data, problem.sis_s0, problem.sis_n_pop, problem.prior,
                                  problem.lattice, q);
  } else {
    const double eps = config.reference_threshold.value_or(problem.thresholds.back());
    SampleSet draws;
    try {
      draws = abc_rejection(problem.prior, std::nullopt, *problem.model, eps, config.reference_samples,
                            config.reference_seed, {config.workers, config.budget_cap});
    } catch (const BudgetExhausted& e) {
      throw ConfigError("reference: budget of " + std::to_string(config.budget_cap) +
                        " simulations ran out after " + std::to_string(e.partial().size()) +
                        " of " + std::to_string(config.reference_samples) + " acceptances");
    }
    ref = monotonicity_adjust(level_cdf(draws.samples, problem.lattice));
    if (!cache.empty()) {
      write_csv(samples_table(draws, problem.names), reference_samples_path(cache));
    }
    if (ref.out_of_range > 0) {
      warn("reference: " + std::to_string(ref.out_of_range) + " samples fall outside the lattice");
    }
  }
  if (!cache.empty()) save_lattice_cdf(ref, problem.names, cache);
  return ref;
}

}  // namespace mlabc::bench
