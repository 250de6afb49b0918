#include "mlabc/samplers/mcmc.hpp"

#include <algorithm>
#include <string>

namespace mlabc {

MarkovChainTrace mcmc_abc(const ParameterVector& init, const GaussianKernel& kernel,
                          const Prior& prior, const AbcModel& model, double epsilon,
                          std::size_t n_iterations, std::uint64_t seed,
                          const McmcOptions& options) {
  if (n_iterations < 1) throw InvalidArgument("mcmc_abc: N_T must be >= 1");
  if (init.size() != prior.dimension() || kernel.dimension() != prior.dimension()) {
    throw InvalidArgument("mcmc_abc: dimension mismatch");
  }
  if (!prior.in_support(init)) throw InvalidArgument("mcmc_abc: initial state outside prior support");

  Rng rng(seed);
  MarkovChainTrace trace;
  trace.states.reserve(n_iterations);
  trace.states.push_back(init);
  for (std::size_t i = 1; i < n_iterations; ++i) {
    const ParameterVector& current = trace.states.back();
    ParameterVector proposal = kernel.sample(current, rng);
    bool move = false;
    if (prior.in_support(proposal)) {
      if (trace.cost.steps() >= options.budget_cap) {
        SampleSet partial;
        partial.samples = trace.states;
        partial.threshold = epsilon;
        partial.cost = trace.cost;
        throw BudgetExhausted("mcmc_abc: simulation budget exhausted at iteration " +
                                  std::to_string(i),
                              std::move(partial));
      }
      trace.cost.add();
      if (model.simulate_discrepancy(proposal, rng, epsilon) <= epsilon) {
        // Symmetric kernel: the proposal densities cancel.
        const double h = std::min(prior.density_ratio(proposal, current), 1.0);
        move = rng.uniform() <= h;
      }
    }
    if (move) {
      ++trace.accepted;
      trace.states.push_back(std::move(proposal));
    } else {
      trace.states.push_back(current);
    }
  }
  return trace;
}

}  // namespace mlabc
