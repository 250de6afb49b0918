#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlabc/mlmc/lattice.hpp"
#include "mlabc/parameter.hpp"

namespace mlabc {

/// How the coarse partner of each level sample is produced.
enum class CouplingMode {
  MarginalMatching,  // quantile matching through the marginal CDFs
  Identity,          // matched == level sample (test hook)
  Independent,       // fresh draws at the coarser threshold (uncoupled estimator)
};

const char* to_string(CouplingMode mode);
CouplingMode coupling_mode_from_string(const std::string& name);

/// Moves every level sample to the coarser level by matching marginal
/// probabilities component by component:
///   matched_j = G_acc,j(F_level,j(theta_j)).
/// `level_marginals` are evaluated by linear interpolation and should be
/// nondecreasing; `accumulated` must be monotonicity-adjusted. A constant
/// accumulated marginal maps everything to its first node (with a warning).
std::vector<ParameterVector> couple_samples(std::span<const ParameterVector> level,
                                            const std::vector<MarginalCdf>& level_marginals,
                                            const std::vector<MarginalCdf>& accumulated);

}  // namespace mlabc
