#include <benchmark/benchmark.h>

#include <vector>

#include "mlabc/abc/prior.hpp"
#include "mlabc/mlmc/coupling.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/models/sis.hpp"
#include "mlabc/models/tb.hpp"
#include "mlabc/random.hpp"

using namespace mlabc;

namespace {

TimeSeriesData sis_data() {
  Rng rng(1);
  return sis_simulate({0.003, 0.1}, 100, 1, sis_default_observation_times(), rng);
}

std::vector<ParameterVector> prior_draws(std::size_t n) {
  const Prior prior = Prior::sis_default();
  Rng rng(7);
  std::vector<ParameterVector> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prior.sample(rng));
  return out;
}

void BM_SisSimulation(benchmark::State& state) {
  const SisAbcModel model(sis_data(), 100, 1);
  Rng rng(3);
  const ParameterVector theta{0.003, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(model.simulate_discrepancy(theta, rng, 1e300));
}
BENCHMARK(BM_SisSimulation);

void BM_TbSimulation(benchmark::State& state) {
  const TbAbcModel model(tb_observed_data());
  Rng rng(3);
  const ParameterVector theta{0.8, 0.2, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(model.simulate_discrepancy(theta, rng, 1e300));
}
BENCHMARK(BM_TbSimulation);

void BM_SisTransitionMatrix(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sis_transition_matrix(sis_generator_matrix({0.003, 0.1}, 101), 4.0));
}
BENCHMARK(BM_SisTransitionMatrix);

void BM_LevelCdf(benchmark::State& state) {
  const auto samples = prior_draws(static_cast<std::size_t>(state.range(0)));
  const Lattice lattice({{0.0, 0.06, 100}, {0.0, 2.0, 100}});
  for (auto _ : state) benchmark::DoNotOptimize(level_cdf(samples, lattice));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LevelCdf)->Arg(1000)->Arg(10000);

void BM_Coupling(benchmark::State& state) {
  const auto samples = prior_draws(static_cast<std::size_t>(state.range(0)));
  const Lattice lattice({{0.0, 0.06, 100}, {0.0, 2.0, 100}});
  const LatticeCdf cdf = monotonicity_adjust(level_cdf(samples, lattice));
  const auto marginals = marginal_cdfs(cdf);
  for (auto _ : state) benchmark::DoNotOptimize(couple_samples(samples, marginals, marginals));
}
BENCHMARK(BM_Coupling)->Arg(10000);

}  // namespace
