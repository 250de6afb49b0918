#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/random.hpp"

namespace mlabc {

struct TbParameters {
  double alpha = 0.0;  // transmission (birth) rate per case
  double delta = 0.0;  // death / recovery rate per case
  double mu = 0.0;     // mutation rate per case
};

/// Genotype clusters of a sample of n cases. cluster_sizes is kept sorted in
/// decreasing order, so equal multisets compare equal.
class ClusterData {
 public:
  ClusterData() = default;
  explicit ClusterData(std::vector<int> cluster_sizes);

  /// Builds data from (cluster size, multiplicity) pairs.
  static ClusterData from_summary(const std::vector<std::pair<int, int>>& size_multiplicity);

  const std::vector<int>& cluster_sizes() const noexcept { return sizes_; }
  int n() const noexcept { return n_; }
  int g() const noexcept { return static_cast<int>(sizes_.size()); }
  std::int64_t sum_of_squares() const noexcept { return sum_sq_; }

  /// (cluster size, multiplicity) pairs in decreasing size order.
  std::vector<std::pair<int, int>> summary() const;

  friend bool operator==(const ClusterData& a, const ClusterData& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<int> sizes_;
  int n_ = 0;
  std::int64_t sum_sq_ = 0;
};

/// Clusters of the IS6110 fingerprint sample used as the observed TB dataset:
/// 30^1 23^1 15^1 10^1 8^1 5^2 4^4 3^13 2^20 1^282 (n = 473, g = 326).
ClusterData tb_observed_data();

struct TbSimulationOptions {
  std::int64_t max_infections = 10'000;
  int subsample_n = 473;
  std::int64_t initial_infections = 1;  // all of a single genotype
};

/// Birth-death-mutation process over per-genotype case counts. Runs until the
/// case count reaches max_infections, then samples subsample_n cases without
/// replacement and clusters them by genotype. Returns nullopt on extinction.
///
/// Only the jump chain is simulated: the stopping rule and the output depend
/// on the order of events, not on their times.
std::optional<ClusterData> tb_simulate(const TbParameters& params,
                                       const TbSimulationOptions& options, Rng& rng);

/// H = 1 - sum n_i^2 / n^2.
double genetic_diversity(const ClusterData& data);

/// |g(D) - g(Ds)| / n + |H(D) - H(Ds)| with n taken from the observed data.
/// An extinct simulation (nullopt) is infinitely far away.
double tb_discrepancy(const ClusterData& observed, const std::optional<ClusterData>& simulated);

/// Two-column CSV: cluster_size, multiplicity.
ClusterData load_cluster_csv(const std::filesystem::path& path);
void save_cluster_csv(const ClusterData& data, const std::filesystem::path& path);

/// ABC problem for the TB model with theta = (alpha, delta, mu). Parameter
/// vectors with a negative rate cannot be simulated and are reported at
/// infinite distance, i.e. rejected.
class TbAbcModel final : public AbcModel {
 public:
  explicit TbAbcModel(ClusterData observed, TbSimulationOptions options = {});

  std::size_t dimension() const override { return 3; }
  std::string name() const override { return "tb"; }
  double simulate_discrepancy(const ParameterVector& theta, Rng& rng,
                              double cutoff) const override;

  const ClusterData& observed() const noexcept { return observed_; }
  const TbSimulationOptions& options() const noexcept { return options_; }

 private:
  ClusterData observed_;
  TbSimulationOptions options_;
  double observed_h_;
};

}  // namespace mlabc
