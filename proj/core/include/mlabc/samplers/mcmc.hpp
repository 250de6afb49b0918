#pragma once

#include <cstdint>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/abc/prior.hpp"
#include "mlabc/abc/rejection.hpp"
#include "mlabc/samplers/kernel.hpp"

namespace mlabc {

struct MarkovChainTrace {
  std::vector<ParameterVector> states;  // theta^1 .. theta^{N_T}
  std::uint64_t accepted = 0;           // number of moves to a proposed state
  CostCounter cost;
};

struct McmcOptions {
  std::uint64_t budget_cap = 1'000'000'000;
};

/// ABC Metropolis-Hastings with a symmetric Gaussian proposal. Each iteration
/// inside the prior support runs one simulation; the chain moves only when
/// the simulation lands within epsilon and u <= min(pi(theta*)/pi(theta), 1).
/// Proposals outside the support have acceptance probability zero and are not
/// simulated. `init` should be a draw from the ABC posterior.
MarkovChainTrace mcmc_abc(const ParameterVector& init, const GaussianKernel& kernel,
                          const Prior& prior, const AbcModel& model, double epsilon,
                          std::size_t n_iterations, std::uint64_t seed,
                          const McmcOptions& options = {});

}  // namespace mlabc
