#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/abc/prior.hpp"
#include "mlabc/abc/rejection.hpp"
#include "mlabc/samplers/kernel.hpp"

namespace mlabc {

/// Weighted particle approximation of the ABC posterior at one threshold.
struct ParticleEnsemble {
  std::vector<ParameterVector> particles;
  std::vector<double> weights;        // normalized
  std::vector<double> discrepancies;  // of each particle's accepted simulation
  std::size_t stage = 1;              // 1-based threshold index t
  double epsilon = 0.0;
  CostCounter cost;                   // simulations spent on this stage

  /// Effective sample size 1 / sum W^2.
  double effective_sample_size() const;
};

struct SmcRun {
  std::vector<ParticleEnsemble> stages;

  const ParticleEnsemble& final_stage() const { return stages.back(); }
  CostCounter total_cost() const;
};

struct SmcOptions {
  unsigned workers = 0;
  std::uint64_t budget_cap = 1'000'000'000;
};

/// Draws an index with probability proportional to weights, given their
/// running sums (cumulative.back() is the total).
std::size_t sample_index(std::span<const double> cumulative, Rng& rng);

/// ABC sequential Monte Carlo. Stage 1 holds N_P draws from the prior that
/// satisfy d <= epsilon_1, equally weighted. Stage t > 1 refills each particle
/// slot by repeatedly picking an ancestor by weight, perturbing it with the
/// kernel and simulating until d <= epsilon_t, then weights it by
/// pi(theta) / sum_j W_{t-1}^j q(theta | theta_{t-1}^j). Perturbations outside
/// the prior support are discarded without simulating.
///
/// Throws DegeneracyError if the weights vanish or the effective sample size
/// of an ensemble with N_P >= 2 collapses to 1.
SmcRun smc_abc(std::size_t n_particles, std::span<const double> schedule,
               const GaussianKernel& kernel, const Prior& prior, const AbcModel& model,
               std::uint64_t seed, const SmcOptions& options = {});

/// Checks a finished run against the schedule: one ensemble per threshold,
/// N_P particles in the prior support with nonnegative weights summing to
/// one, every stored discrepancy within its threshold, and stage costs that
/// add up to the total. Returns a description of each violation.
std::vector<std::string> smc_invariant_violations(const SmcRun& run, std::span<const double> schedule,
                                                  std::size_t n_particles, const Prior& prior);

}  // namespace mlabc
