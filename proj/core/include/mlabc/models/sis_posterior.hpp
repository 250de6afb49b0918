#pragma once

#include <functional>

#include "mlabc/abc/prior.hpp"
#include "mlabc/mlmc/lattice.hpp"
#include "mlabc/models/sis.hpp"

namespace mlabc {

/// Fast evaluation of the exact SIS likelihood. Each observation gap
/// propagates only the one needed column of exp(Q dt), by uniformization.
/// Agrees with sis_exact_likelihood to rounding.
class SisLikelihood {
 public:
  SisLikelihood(TimeSeriesData data, int s0, int n_pop);
  double operator()(const SisParameters& params) const;
  double operator()(const ParameterVector& theta) const { return (*this)(SisParameters{theta[0], theta[1]}); }

 private:
  TimeSeriesData data_;
  int s0_;
  int n_pop_;
};

/// Column y of exp(Q dt) by uniformization with substeps.
std::vector<double> sis_transition_column(const GeneratorMatrix& q, double dt, std::size_t y);

struct QuadratureOptions {
  std::size_t scan_points = 48;   // per axis, when locating the posterior mass
  std::size_t fine_points = 300;  // per axis over the located region
  double tolerance = 1e-10;       // likelihood relative to its maximum counted as zero
  unsigned workers = 0;
};

using LikelihoodFn = std::function<double(const ParameterVector&)>;

/// Posterior CDF at the nodes of a 2-D lattice for a uniform prior on `box`.
/// The region carrying the posterior mass is found by repeated scans, then
/// integrated with the trapezoid rule on a tensor grid that contains every
/// lattice node in the region. Throws DegeneratePosterior if the likelihood
/// vanishes on every scan point.
LatticeCdf posterior_cdf_uniform_prior(const LikelihoodFn& likelihood, const BoundingBox& box,
                                       const Lattice& lattice,
                                       const QuadratureOptions& options = {});

/// Exact posterior CDF of (beta, gamma) for the SIS model. The prior must be
/// uniform in both components.
LatticeCdf sis_exact_posterior_cdf(const TimeSeriesData& data, int s0, int n_pop,
                                   const Prior& prior, const Lattice& lattice,
                                   const QuadratureOptions& options = {});

}  // namespace mlabc
