#include "mlabc/models/tb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "mlabc/error.hpp"
#include "text_io.hpp"

namespace mlabc {

ClusterData::ClusterData(std::vector<int> cluster_sizes) : sizes_(std::move(cluster_sizes)) {
  std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("ClusterData: cluster sizes must be >= 1");
    n_ += s;
    sum_sq_ += static_cast<std::int64_t>(s) * s;
  }
}

ClusterData ClusterData::from_summary(const std::vector<std::pair<int, int>>& size_multiplicity) {
  std::vector<int> sizes;
  for (auto [size, count] : size_multiplicity) {
    if (count < 0) throw InvalidArgument("ClusterData: negative multiplicity");
    sizes.insert(sizes.end(), static_cast<std::size_t>(count), size);
  }
  return ClusterData(std::move(sizes));
}

std::vector<std::pair<int, int>> ClusterData::summary() const {
  std::vector<std::pair<int, int>> out;
  for (int s : sizes_) {
    if (!out.empty() && out.back().first == s) {
      ++out.back().second;
    } else {
      out.emplace_back(s, 1);
    }
  }
  return out;
}

ClusterData tb_observed_data() {
  return ClusterData::from_summary({{30, 1}, {23, 1}, {15, 1}, {10, 1}, {8, 1},
                                    {5, 2}, {4, 4}, {3, 13}, {2, 20}, {1, 282}});
}

std::optional<ClusterData> tb_simulate(const TbParameters& params,
                                       const TbSimulationOptions& options, Rng& rng) {
  if (!(params.alpha >= 0.0) || !(params.delta >= 0.0) || !(params.mu >= 0.0)) {
    throw InvalidModel("TB rates must be nonnegative");
  }
  if (options.subsample_n < 1) throw InvalidArgument("tb_simulate: subsample_n must be >= 1");
  if (options.initial_infections < 1) {
    throw InvalidArgument("tb_simulate: initial_infections must be >= 1");
  }

  // One entry per current case holding its genotype id. Every event picks a
  // case uniformly, which is the same as picking genotype i with probability
  // X_i / I.
  std::vector<std::int32_t> cases(static_cast<std::size_t>(options.initial_infections), 0);
  std::int32_t next_genotype = 1;
  const double per_case = params.alpha + params.delta + params.mu;
  const double birth = params.alpha;
  const double birth_or_death = params.alpha + params.delta;

  while (static_cast<std::int64_t>(cases.size()) < options.max_infections) {
    if (cases.empty()) return std::nullopt;
    if (per_case == 0.0) break;  // frozen: no event can ever fire
    const double u = rng.uniform() * per_case;
    const auto c = static_cast<std::size_t>(rng.below(cases.size()));
    if (u < birth) {
      cases.push_back(cases[c]);
    } else if (u < birth_or_death) {
      cases[c] = cases.back();
      cases.pop_back();
    } else {
      cases[c] = next_genotype++;
    }
  }
  if (cases.empty()) return std::nullopt;

  const std::size_t m = std::min(cases.size(), static_cast<std::size_t>(options.subsample_n));
  for (std::size_t k = 0; k < m; ++k) {
    const auto j = k + static_cast<std::size_t>(rng.below(cases.size() - k));
    std::swap(cases[k], cases[j]);
  }
  std::sort(cases.begin(), cases.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<int> sizes;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == 0 || cases[k] != cases[k - 1]) {
      sizes.push_back(1);
    } else {
      ++sizes.back();
    }
  }
  return ClusterData(std::move(sizes));
}

double genetic_diversity(const ClusterData& data) {
  if (data.n() < 1) throw InvalidArgument("genetic_diversity: empty dataset");
  const double n = data.n();
  return 1.0 - static_cast<double>(data.sum_of_squares()) / (n * n);
}

double tb_discrepancy(const ClusterData& observed, const std::optional<ClusterData>& simulated) {
  if (!simulated) return std::numeric_limits<double>::infinity();
  const double n = observed.n();
  return std::abs(observed.g() - simulated->g()) / n +
         std::abs(genetic_diversity(observed) - genetic_diversity(*simulated));
}

ClusterData load_cluster_csv(const std::filesystem::path& path) {
  std::vector<std::pair<int, int>> summary;
  for (const auto& row : detail::read_numeric_rows(path, 2)) {
    if (row[0] != std::floor(row[0]) || row[1] != std::floor(row[1])) {
      throw ConfigError(path.string() + ": cluster sizes and multiplicities must be integers");
    }
    summary.emplace_back(static_cast<int>(row[0]), static_cast<int>(row[1]));
  }
  return ClusterData::from_summary(summary);
}

void save_cluster_csv(const ClusterData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "cluster_size,multiplicity\n";
  for (auto [size, count] : data.summary()) out << size << ',' << count << '\n';
}

TbAbcModel::TbAbcModel(ClusterData observed, TbSimulationOptions options)
    : observed_(std::move(observed)), options_(options) {
  if (observed_.n() < 1) throw InvalidArgument("TbAbcModel: empty observed dataset");
  observed_h_ = genetic_diversity(observed_);
}

double TbAbcModel::simulate_discrepancy(const ParameterVector& theta, Rng& rng, double) const {
  if (!(theta[0] >= 0.0) || !(theta[1] >= 0.0) || !(theta[2] >= 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const auto simulated = tb_simulate({theta[0], theta[1], theta[2]}, options_, rng);
  if (!simulated) return std::numeric_limits<double>::infinity();
  return std::abs(observed_.g() - simulated->g()) / static_cast<double>(observed_.n()) +
         std::abs(observed_h_ - genetic_diversity(*simulated));
}

}  // namespace mlabc
