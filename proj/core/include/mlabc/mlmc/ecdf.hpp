#pragma once

#include <span>
#include <vector>

#include "mlabc/abc/rejection.hpp"
#include "mlabc/mlmc/lattice.hpp"

namespace mlabc {

/// Smoothed empirical CDF: the mean of the smoothed indicators of the samples
/// at every lattice node. Each sample touches the O(3^k) nodes around it; the
/// dominated orthant is filled in by one prefix-sum pass over the lattice.
/// Samples outside the lattice box still contribute (as if clamped) and are
/// counted in out_of_range.
LatticeCdf level_cdf(std::span<const ParameterVector> samples, const Lattice& lattice);
inline LatticeCdf level_cdf(const SampleSet& samples, const Lattice& lattice) {
  return level_cdf(samples.samples, lattice);
}

/// Weighted version: sum_i w_i g_s(theta_i) / sum_i w_i.
LatticeCdf level_cdf(std::span<const ParameterVector> samples, std::span<const double> weights,
                     const Lattice& lattice);

/// Smoothed indicator of one sample at every lattice node.
std::vector<double> indicator_grid(const ParameterVector& theta, const Lattice& lattice);

/// Per-node mean of g_s(level_i) - g_s(matched_i) over aligned pairs.
LatticeCdf bias_correction(std::span<const ParameterVector> level,
                           std::span<const ParameterVector> matched, const Lattice& lattice);

/// Clamps to [0, 1], then takes a running maximum along each axis in order.
/// The result is nondecreasing along every axis; the operation is idempotent.
LatticeCdf monotonicity_adjust(LatticeCdf cdf);

/// Marginal of axis j: the CDF slice with every other axis at its top node.
std::vector<MarginalCdf> marginal_cdfs(const LatticeCdf& cdf);

/// Smallest x with F(x) >= p under linear interpolation between nodes; clamps
/// to the first node for p <= F(first) and to the last node for p > F(last).
double inverse_marginal(const MarginalCdf& marginal, double p);

/// 1-D smoothed eCDF of coordinate `component` on the given axis nodes.
MarginalCdf smoothed_axis_cdf(std::span<const ParameterVector> samples, std::size_t component,
                              const LatticeAxis& axis);

/// Clamp + running maximum for a single marginal.
MarginalCdf monotonicity_adjust(MarginalCdf marginal);

}  // namespace mlabc
