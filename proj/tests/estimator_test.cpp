#include <gtest/gtest.h>

#include <cmath>

#include "mlabc/error.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/mlmc/estimator.hpp"
#include "mlabc/models/sis.hpp"
#include "test_support.hpp"

using namespace mlabc;

namespace {

Prior unit_square() {
  return Prior({{"a", UniformPrior{0.0, 1.0}}, {"b", UniformPrior{0.0, 1.0}}});
}

// Noisy distance to (0.3, 0.6).
const FunctionModel& toy_model() {
  static const FunctionModel model(2, [](const ParameterVector& t, Rng& rng) {
    const double a = t[0] - 0.3 + 0.1 * rng.normal();
    const double b = t[1] - 0.6 + 0.1 * rng.normal();
    return std::sqrt(a * a + b * b);
  });
  return model;
}

const Lattice& toy_lattice() {
  static const Lattice lat({LatticeAxis{0.0, 1.0, 21}, LatticeAxis{0.0, 1.0, 21}});
  return lat;
}

MlmcOptions single_worker() {
  MlmcOptions o;
  o.workers = 1;
  return o;
}

}  // namespace

TEST(Mlmc, SingleLevelIsRejection) {
  const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.3}, {400}, toy_lattice(), 17,
                                single_worker());
  const auto rej = abc_rejection(unit_square(), std::nullopt, toy_model(), 0.3, 400,
                                 derive_seed(17, {1}), {1});
  EXPECT_EQ(res.cdf.values, monotonicity_adjust(level_cdf(rej, toy_lattice())).values);
  EXPECT_EQ(res.cost, rej.cost);
  EXPECT_TRUE(res.cdf.adjusted);
}

TEST(Mlmc, IdentityCouplingTelescopesToLevelOne) {
  MlmcOptions o = single_worker();
  o.coupling = CouplingMode::Identity;
  const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                                toy_lattice(), 5, o);
  const auto first = monotonicity_adjust(level_cdf(res.level_samples[0], toy_lattice()));
  EXPECT_EQ(res.cdf.values, first.values);
  for (std::size_t l = 1; l < 3; ++l) EXPECT_EQ(res.levels[l].correction_sup, 0.0);
}

TEST(Mlmc, CostIsConserved) {
  for (auto mode : {CouplingMode::MarginalMatching, CouplingMode::Independent}) {
    MlmcOptions o = single_worker();
    o.coupling = mode;
    const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                                  toy_lattice(), 6, o);
    std::uint64_t levels = 0, samples = 0;
    for (const auto& r : res.levels) levels += r.simulations;
    for (const auto& s : res.level_samples) samples += s.cost.steps();
    EXPECT_EQ(res.cost.steps(), levels);
    if (mode == CouplingMode::MarginalMatching) {
      EXPECT_EQ(levels, samples);
    } else {
      EXPECT_GT(levels, samples);
    }
  }
}

TEST(Mlmc, WorkerCountDoesNotChangeResult) {
  MlmcOptions one = single_worker(), four;
  four.workers = 4;
  const auto a = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                              toy_lattice(), 7, one);
  const auto b = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                              toy_lattice(), 7, four);
  EXPECT_EQ(a.cdf.values, b.cdf.values);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Mlmc, ProposalsAreTruncatedToPreviousLevel) {
  const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                                toy_lattice(), 8, single_worker());
  EXPECT_FALSE(res.levels[0].proposal_box.has_value());
  for (std::size_t l = 1; l < 3; ++l) {
    ASSERT_TRUE(res.levels[l].proposal_box.has_value());
    EXPECT_EQ(*res.levels[l].proposal_box, support_bounding_box(res.level_samples[l - 1]));
    for (const auto& s : res.level_samples[l].samples) EXPECT_TRUE(res.levels[l].proposal_box->contains(s));
  }
}

TEST(Mlmc, OutputIsValidCdf) {
  const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2, 0.1}, {300, 200, 100},
                                toy_lattice(), 9, single_worker());
  const auto& lat = toy_lattice();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    ASSERT_GE(res.cdf.values[f], 0.0);
    ASSERT_LE(res.cdf.values[f], 1.0);
    const auto idx = lat.unflatten(f);
    for (std::size_t j = 0; j < 2; ++j) {
      if (idx[j] > 0) ASSERT_GE(res.cdf.values[f], res.cdf.values[f - lat.stride(j)]);
    }
  }
}

TEST(Mlmc, CouplingCorrelatesPairs) {
  const auto res = mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2}, {300, 2000}, toy_lattice(),
                                10, single_worker());
  for (std::size_t j = 0; j < 2; ++j) {
    const auto x = mlabc::testing::component(res.level_samples[1].samples, j);
    const auto y = mlabc::testing::component(res.matched[1], j);
    const double mx = mlabc::testing::mean(x), my = mlabc::testing::mean(y);
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx) * (y[i] - my);
    cov /= static_cast<double>(x.size() - 1);
    EXPECT_GT(cov / (mlabc::testing::sample_sd(x) * mlabc::testing::sample_sd(y)), 0.9);
  }
}

TEST(Mlmc, InputErrors) {
  const auto& lat = toy_lattice();
  EXPECT_THROW(mlmc_abc_cdf(unit_square(), toy_model(), {0.2, 0.4}, {10, 10}, lat, 1), ConfigError);
  EXPECT_THROW(mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.2}, {10}, lat, 1), InvalidArgument);
  EXPECT_THROW(mlmc_abc_cdf(unit_square(), toy_model(), {0.4}, {0}, lat, 1), InvalidArgument);
  const Lattice one_d({LatticeAxis{0.0, 1.0, 5}});
  EXPECT_THROW(mlmc_abc_cdf(unit_square(), toy_model(), {0.4}, {10}, one_d, 1), InvalidArgument);
}

TEST(Mlmc, BudgetErrorNamesLevel) {
  MlmcOptions o = single_worker();
  o.budget_cap = 3000;
  try {
    mlmc_abc_cdf(unit_square(), toy_model(), {0.4, 0.01}, {100, 100}, toy_lattice(), 2, o);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& e) {
    EXPECT_NE(std::string(e.what()).find("level 2"), std::string::npos) << e.what();
  }
}

TEST(TrialRun, DeterministicSimulatorHasUnitCost) {
  const FunctionModel exact(2, [](const ParameterVector&, Rng&) { return 0.0; });
  const auto plan = trial_run(unit_square(), exact, {0.4, 0.2, 0.1}, toy_lattice(), 50, 3,
                              single_worker());
  for (double c : plan.costs) EXPECT_EQ(c, 1.0);
  EXPECT_EQ(plan.tallies, (std::vector<std::uint64_t>{50, 50, 50}));
  EXPECT_GT(plan.variances[0], 0.0);
  EXPECT_NO_THROW(plan.validate());
}

TEST(TrialRun, IdentityCouplingHasZeroCorrectionVariance) {
  MlmcOptions o = single_worker();
  o.coupling = CouplingMode::Identity;
  const auto plan = trial_run(unit_square(), toy_model(), {0.4, 0.2}, toy_lattice(), 100, 4, o);
  EXPECT_GT(plan.variances[0], 0.0);
  EXPECT_EQ(plan.variances[1], 0.0);
  EXPECT_THROW(trial_run(unit_square(), toy_model(), {0.4}, toy_lattice(), 1, 4), InvalidArgument);
}

TEST(TrialRun, VarianceMatchesIndicatorVariance) {
  // v_1 is the largest per-node sample variance of the smoothed indicator;
  // for a Bernoulli-like indicator it is at most about 1/4 (plus overshoot).
  const auto plan = trial_run(unit_square(), toy_model(), {0.4}, toy_lattice(), 200, 5,
                              single_worker());
  EXPECT_GT(plan.variances[0], 0.15);
  EXPECT_LT(plan.variances[0], 0.3);
}

TEST(Expectation, ConstantIsExact) {
  const auto r = mlmc_abc_expectation([](const ParameterVector&) { return 0.7; }, unit_square(),
                                      toy_model(), {0.4, 0.2, 0.1}, {200, 100, 50},
                                      toy_lattice().axes(), 1, single_worker());
  EXPECT_EQ(r.estimate, 0.7);
  EXPECT_EQ(r.terms[1], 0.0);
  EXPECT_EQ(r.terms[2], 0.0);
}

TEST(Expectation, SingleLevelIsSampleMean) {
  const auto r = mlmc_abc_expectation([](const ParameterVector& t) { return t[0]; }, unit_square(),
                                      toy_model(), {0.3}, {500}, toy_lattice().axes(), 2,
                                      single_worker());
  const auto rej = abc_rejection(unit_square(), std::nullopt, toy_model(), 0.3, 500,
                                 derive_seed(2, {1}), {1});
  EXPECT_NEAR(r.estimate, mlabc::testing::mean(mlabc::testing::component(rej.samples, 0)), 1e-14);
  EXPECT_EQ(r.cost, rej.cost);
}

TEST(Expectation, SisBetaAgreesWithRejection) {
  Rng gen(1);
  const auto data = sis_simulate({0.003, 0.1}, 100, 1, sis_default_observation_times(), gen);
  const SisAbcModel model(data, 100, 1);
  const Prior prior = Prior::sis_default();
  const std::vector<LatticeAxis> axes{{0.0, 0.06, 100}, {0.0, 2.0, 100}};
  auto beta = [](const ParameterVector& t) { return t[0]; };
  const auto ml = mlmc_abc_expectation(beta, prior, model, {150, 100, 75}, {4000, 1500, 800}, axes,
                                       11, single_worker());
  const auto rej = abc_rejection(prior, std::nullopt, model, 75, 10000, 12, {1});
  const auto b = mlabc::testing::component(rej.samples, 0);
  const double se_rej = mlabc::testing::sample_sd(b) / std::sqrt(10000.0);
  const double se = std::sqrt(ml.standard_error() * ml.standard_error() + se_rej * se_rej);
  EXPECT_LT(std::abs(ml.estimate - mlabc::testing::mean(b)), 3.0 * se)
      << ml.estimate << " vs " << mlabc::testing::mean(b) << " se " << se;
}
