#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mlabc/abc/model.hpp"
#include "mlabc/models/ssa.hpp"
#include "mlabc/random.hpp"

namespace mlabc {

struct SisParameters {
  double beta = 0.0;   // infection rate per S-I contact pair
  double gamma = 0.0;  // recovery rate per infected
};

/// Susceptible counts observed at strictly increasing times.
struct TimeSeriesData {
  std::vector<double> times;
  std::vector<int> values;

  /// Throws InvalidArgument unless the invariants hold for population n_pop.
  void validate(int n_pop) const;
  friend bool operator==(const TimeSeriesData&, const TimeSeriesData&) = default;
};

/// Observation schedule t = 4, 8, ..., 40.
std::vector<double> sis_default_observation_times();

/// S + I -> 2I with hazard beta*S*I, I -> S with hazard gamma*I.
/// Species order (S, I); theta = (beta, gamma).
ReactionNetwork sis_network();

/// One Gillespie trajectory started at (S0, I0), recorded at obs_times.
TimeSeriesData sis_simulate(const SisParameters& params, int s0, int i0,
                            std::span<const double> obs_times, Rng& rng);

/// Tridiagonal infinitesimal generator over S in {0..n_pop}. Column y holds
/// the rates out of state S = y.
class GeneratorMatrix {
 public:
  GeneratorMatrix(std::vector<double> lower, std::vector<double> diagonal,
                  std::vector<double> upper);

  std::size_t dimension() const noexcept { return diagonal_.size(); }
  /// Entry (row, col); zero off the three diagonals.
  double operator()(std::size_t row, std::size_t col) const;
  Eigen::MatrixXd dense() const;

  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> diagonal() const noexcept { return diagonal_; }
  std::span<const double> upper() const noexcept { return upper_; }

 private:
  std::vector<double> lower_;     // (y+1, y): recovery
  std::vector<double> diagonal_;  // (y, y)
  std::vector<double> upper_;     // (y-1, y): infection
};

GeneratorMatrix sis_generator_matrix(const SisParameters& params, int n_pop);

/// exp(Q dt) by scaling and squaring. Entry (x, y) is P(S(t+dt) = x | S(t) = y).
/// Throws NumericalError if a column sum drifts from 1 by more than 1e-9.
Eigen::MatrixXd sis_transition_matrix(const GeneratorMatrix& q, double dt);

/// Product of transition probabilities between consecutive observations, with
/// S(0) = s0 almost surely. One transition matrix is built per distinct gap.
double sis_exact_likelihood(const SisParameters& params, const TimeSeriesData& data, int s0,
                            int n_pop);

/// Euclidean distance between the two observation vectors.
double sis_discrepancy(const TimeSeriesData& observed, const TimeSeriesData& simulated);

TimeSeriesData load_time_series_csv(const std::filesystem::path& path);
void save_time_series_csv(const TimeSeriesData& data, const std::filesystem::path& path);

/// ABC problem for the SIS model with theta = (beta, gamma). Simulation stops
/// as soon as the partial sum of squared errors exceeds cutoff^2.
class SisAbcModel final : public AbcModel {
 public:
  SisAbcModel(TimeSeriesData observed, int s0, int i0);

  std::size_t dimension() const override { return 2; }
  std::string name() const override { return "sis"; }
  double simulate_discrepancy(const ParameterVector& theta, Rng& rng,
                              double cutoff) const override;

  const TimeSeriesData& observed() const noexcept { return observed_; }
  int s0() const noexcept { return s0_; }
  int i0() const noexcept { return i0_; }
  int population() const noexcept { return s0_ + i0_; }

 private:
  TimeSeriesData observed_;
  int s0_;
  int i0_;
};

}  // namespace mlabc
