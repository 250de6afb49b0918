#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "mlabc/error.hpp"
#include "mlabc/models/sis.hpp"
#include "mlabc/models/sis_posterior.hpp"
#include "mlabc/models/ssa.hpp"

using namespace mlabc;

namespace {

State run_to_end(const SisParameters& p, std::int64_t s, std::int64_t i, double t, Rng& rng,
                 std::uint64_t* events = nullptr) {
  const double theta[2] = {p.beta, p.gamma};
  auto traj = ssa_simulate(sis_network(), theta, {s, i}, {t}, rng);
  if (events) *events = traj.events;
  return traj.states.back();
}

}  // namespace

TEST(Ssa, NoInfectedMeansNoEvents) {
  Rng rng(1);
  std::uint64_t events = 99;
  const State end = run_to_end({0.01, 0.1}, 20, 0, 100.0, rng, &events);
  EXPECT_EQ(events, 0u);
  EXPECT_EQ(end, (State{20, 0}));
}

TEST(Ssa, PureRecoveryFiresOnce) {
  Rng rng(2);
  const double theta[2] = {0.0, 0.1};
  auto traj = ssa_simulate(sis_network(), theta, {100, 1}, {}, rng);
  EXPECT_EQ(traj.events, 1u);
  EXPECT_EQ(traj.end, TrajectoryEnd::Absorbed);
  EXPECT_EQ(traj.states.back(), (State{101, 0}));
}

TEST(Ssa, EventCapStops) {
  Rng rng(3);
  const double theta[2] = {0.003, 0.1};
  auto traj = ssa_simulate(sis_network(), theta, {100, 1}, {1e9, 5}, rng);
  EXPECT_LE(traj.events, 5u);
}

TEST(Ssa, NegativeHazardIsInvalidModel) {
  Rng rng(4);
  const double theta[2] = {-0.1, 0.1};
  EXPECT_THROW(ssa_simulate(sis_network(), theta, {10, 1}, {10.0}, rng), InvalidModel);
}

TEST(Ssa, MeanOfS4MatchesTransitionMatrix) {
  const SisParameters p{0.003, 0.1};
  const auto P = sis_transition_matrix(sis_generator_matrix(p, 101), 4.0);
  double exact_mean = 0.0, exact_sq = 0.0;
  for (int x = 0; x <= 101; ++x) {
    exact_mean += x * P(x, 100);
    exact_sq += x * x * P(x, 100);
  }
  const double sd = std::sqrt(exact_sq - exact_mean * exact_mean);
  Rng rng(5);
  const int runs = 100000;
  double sum = 0.0;
  const std::vector<double> t{4.0};
  for (int r = 0; r < runs; ++r) sum += sis_simulate(p, 100, 1, t, rng).values[0];
  EXPECT_NEAR(sum / runs, exact_mean, 3.0 * sd / std::sqrt(runs));
}

TEST(SisSimulate, NoRecoveryMeansSNonincreasing) {
  Rng rng(6);
  const auto times = sis_default_observation_times();
  ASSERT_EQ(times.size(), 10u);
  EXPECT_DOUBLE_EQ(times.front(), 4.0);
  EXPECT_DOUBLE_EQ(times.back(), 40.0);
  for (int rep = 0; rep < 50; ++rep) {
    auto d = sis_simulate({0.01, 0.0}, 95, 6, times, rng);
    for (std::size_t k = 1; k < d.values.size(); ++k) EXPECT_LE(d.values[k], d.values[k - 1]);
  }
}

TEST(SisSimulate, NoInfectionEventuallyAllSusceptible) {
  Rng rng(7);
  auto d = sis_simulate({0.0, 0.1}, 100, 1, std::vector<double>{1000.0}, rng);
  EXPECT_EQ(d.values[0], 101);
}

TEST(Generator, TwoStateColumn) {
  const double b = 0.3, g = 0.7;
  const auto q = sis_generator_matrix({b, g}, 2);
  EXPECT_DOUBLE_EQ(q(0, 1), b * 1 * 1);
  EXPECT_DOUBLE_EQ(q(2, 1), g * 1);
  EXPECT_DOUBLE_EQ(q(1, 1), -(b + g));
  for (std::size_t x = 0; x < 3; ++x) EXPECT_EQ(q(x, 2), 0.0);
}

TEST(Generator, ColumnsSumToZero) {
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(120));
    const auto q = sis_generator_matrix({rng.uniform(0, 0.06), rng.uniform(0, 2)}, n);
    const Eigen::MatrixXd m = q.dense();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      EXPECT_NEAR(m.col(c).sum(), 0.0, 1e-12 * (1.0 + m.col(c).cwiseAbs().sum()));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r != c) EXPECT_GE(m(r, c), 0.0);
      }
    }
  }
}

TEST(TransitionMatrix, ZeroTimeIsIdentity) {
  const auto P = sis_transition_matrix(sis_generator_matrix({0.003, 0.1}, 101), 0.0);
  EXPECT_TRUE(P.isApprox(Eigen::MatrixXd::Identity(102, 102)));
}

TEST(TransitionMatrix, PureRecoveryAbsorbs) {
  const auto P = sis_transition_matrix(sis_generator_matrix({0.0, 0.5}, 30), 500.0);
  for (int y = 0; y <= 30; ++y) EXPECT_NEAR(P(30, y), 1.0, 1e-9);
}

TEST(TransitionMatrix, TwoStateBlockClosedForm) {
  // N_pop = 2: S = 2 is absorbing and S in {0, 1} is a transient block,
  // Q = [[-2g, b, 0], [2g, -(b+g), 0], [0, g, 0]]. exp of the 2x2 block by its eigenvalues.
  const double b = 0.4, g = 0.3, t = 1.7;
  const auto P = sis_transition_matrix(sis_generator_matrix({b, g}, 2), t);
  // Eigenvalues of the transient 2x2 block A = [[-2g, b], [2g, -(b+g)]].
  const double tr = -2 * g - (b + g), det = 2 * g * (b + g) - 2 * g * b;
  const double disc = std::sqrt(tr * tr / 4 - det);
  const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
  // exp(A t) = (e1 (A - l2 I) - e2 (A - l1 I)) / (l1 - l2)
  const double e1 = std::exp(l1 * t), e2 = std::exp(l2 * t);
  auto expA = [&](int r, int c) {
    const double a[2][2] = {{-2 * g, b}, {2 * g, -(b + g)}};
    const double id = r == c ? 1.0 : 0.0;
    return (e1 * (a[r][c] - l2 * id) - e2 * (a[r][c] - l1 * id)) / (l1 - l2);
  };
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(P(r, c), expA(r, c), 1e-10);
  }
  EXPECT_NEAR(P(2, 1), 1.0 - expA(0, 1) - expA(1, 1), 1e-10);
}

TEST(TransitionMatrix, ColumnsSumToOne) {
  Rng rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto q = sis_generator_matrix({rng.uniform(0, 0.06), rng.uniform(0, 2)}, 101);
    const auto P = sis_transition_matrix(q, rng.uniform(0, 40));
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
      EXPECT_NEAR(P.col(c).sum(), 1.0, 1e-9);
      EXPECT_GE(P.col(c).minCoeff(), 0.0);
      EXPECT_LE(P.col(c).maxCoeff(), 1.0);
    }
  }
}

TEST(Likelihood, ZeroGapCases) {
  TimeSeriesData same{{0.0}, {100}};
  TimeSeriesData other{{0.0}, {99}};
  EXPECT_DOUBLE_EQ(sis_exact_likelihood({0.003, 0.1}, same, 100, 101), 1.0);
  EXPECT_DOUBLE_EQ(sis_exact_likelihood({0.003, 0.1}, other, 100, 101), 0.0);
}

TEST(Likelihood, EqualsProductOfTransitionEntries) {
  Rng rng(10);
  for (int rep = 0; rep < 10; ++rep) {
    const int n_pop = 8;
    const SisParameters p{rng.uniform(0, 0.2), rng.uniform(0, 1)};
    TimeSeriesData d;
    double t = 0.0;
    for (int k = 0; k < 4; ++k) {
      t += 0.5 + static_cast<double>(rng.below(3));
      d.times.push_back(t);
      d.values.push_back(static_cast<int>(rng.below(n_pop + 1)));
    }
    const auto q = sis_generator_matrix(p, n_pop);
    double expected = 1.0, prev_t = 0.0;
    int prev = 6;
    for (std::size_t k = 0; k < d.times.size(); ++k) {
      expected *= sis_transition_matrix(q, d.times[k] - prev_t)(d.values[k], prev);
      prev_t = d.times[k];
      prev = d.values[k];
    }
    EXPECT_NEAR(sis_exact_likelihood(p, d, 6, n_pop), expected, 1e-14 + 1e-12 * expected);
    const SisLikelihood fast(d, 6, n_pop);
    EXPECT_NEAR(fast(p), expected, 1e-14 + 1e-9 * expected);
  }
}

TEST(Likelihood, UniformizationMatchesMatrixExponential) {
  Rng rng(11);
  const auto times = sis_default_observation_times();
  const auto data = sis_simulate({0.003, 0.1}, 100, 1, times, rng);
  const SisLikelihood fast(data, 100, 101);
  for (const SisParameters p : {SisParameters{0.003, 0.1}, SisParameters{0.01, 0.4},
                                SisParameters{0.002, 0.05}, SisParameters{0.06, 2.0}}) {
    const double exact = sis_exact_likelihood(p, data, 100, 101);
    EXPECT_NEAR(fast(p), exact, 1e-300 + 1e-8 * exact);
  }
}

TEST(Discrepancy, Examples) {
  const auto t = sis_default_observation_times();
  TimeSeriesData a{t, {100, 98, 94, 84, 65, 53, 53, 50, 36, 42}};
  TimeSeriesData b = a;
  EXPECT_EQ(sis_discrepancy(a, b), 0.0);
  b.values[3] += 1;
  EXPECT_DOUBLE_EQ(sis_discrepancy(a, b), 1.0);
  b = a;
  b.values[0] -= 3;
  b.values[7] += 4;
  EXPECT_DOUBLE_EQ(sis_discrepancy(a, b), 5.0);
  TimeSeriesData c{{4.0}, {1}};
  EXPECT_THROW(sis_discrepancy(a, c), InvalidArgument);
}

TEST(Discrepancy, TriangleInequalityAndSymmetry) {
  Rng rng(12);
  const auto t = sis_default_observation_times();
  auto draw = [&] {
    TimeSeriesData d{t, {}};
    for (std::size_t k = 0; k < t.size(); ++k) d.values.push_back(static_cast<int>(rng.below(102)));
    return d;
  };
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = draw(), b = draw(), c = draw();
    EXPECT_DOUBLE_EQ(sis_discrepancy(a, b), sis_discrepancy(b, a));
    EXPECT_LE(sis_discrepancy(a, c), sis_discrepancy(a, b) + sis_discrepancy(b, c) + 1e-12);
  }
}

TEST(SisAbcModel, EarlyStopNeverAcceptsWhatFullRunRejects) {
  const auto t = sis_default_observation_times();
  Rng gen(13);
  const auto observed = sis_simulate({0.003, 0.1}, 100, 1, t, gen);
  const SisAbcModel model(observed, 100, 1);
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng a(s), b(s);
    const ParameterVector theta{0.003, 0.1};
    const double full = model.simulate_discrepancy(theta, a, std::numeric_limits<double>::infinity());
    const double cut = model.simulate_discrepancy(theta, b, 30.0);
    if (full <= 30.0) {
      EXPECT_DOUBLE_EQ(cut, full);
    } else {
      EXPECT_GT(cut, 30.0);
    }
  }
}

TEST(TimeSeriesCsv, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "mlabc_sis_roundtrip.csv";
  TimeSeriesData d{sis_default_observation_times(), {100, 98, 94, 84, 65, 53, 53, 50, 36, 42}};
  save_time_series_csv(d, path);
  EXPECT_EQ(load_time_series_csv(path), d);
  std::filesystem::remove(path);
}

TEST(TimeSeriesData, Validation) {
  EXPECT_THROW((TimeSeriesData{{4.0, 4.0}, {1, 2}}.validate(10)), InvalidArgument);
  EXPECT_THROW((TimeSeriesData{{4.0}, {11}}.validate(10)), InvalidArgument);
  EXPECT_THROW((TimeSeriesData{{4.0, 8.0}, {1}}.validate(10)), InvalidArgument);
}

TEST(ExactPosterior, FlatLikelihoodGivesUniformPriorCdf) {
  const Lattice lattice({LatticeAxis{0.0, 0.06, 13}, LatticeAxis{0.0, 2.0, 9}});
  const BoundingBox box{{0.0, 0.0}, {0.06, 2.0}};
  QuadratureOptions opt;
  opt.fine_points = 40;
  opt.scan_points = 8;
  const auto cdf = posterior_cdf_uniform_prior([](const ParameterVector&) { return 1.0; }, box,
                                               lattice, opt);
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    const auto s = lattice.node(f);
    EXPECT_NEAR(cdf.values[f], (s[0] / 0.06) * (s[1] / 2.0), 1e-12);
  }
}

TEST(ExactPosterior, ZeroLikelihoodIsDegenerate) {
  const Lattice lattice({LatticeAxis{0.0, 1.0, 5}, LatticeAxis{0.0, 1.0, 5}});
  EXPECT_THROW(posterior_cdf_uniform_prior([](const ParameterVector&) { return 0.0; },
                                           {{0.0, 0.0}, {1.0, 1.0}}, lattice),
               DegeneratePosterior);
}

TEST(ExactPosterior, GaussianBumpMatchesProductOfNormalCdfs) {
  // Independent normal likelihood well inside the box: the posterior CDF is
  // the product of the two normal CDFs.
  const double m0 = 0.4, s0 = 0.05, m1 = 0.6, s1 = 0.08;
  auto like = [&](const ParameterVector& t) {
    const double z0 = (t[0] - m0) / s0, z1 = (t[1] - m1) / s1;
    return std::exp(-0.5 * (z0 * z0 + z1 * z1));
  };
  const Lattice lattice({LatticeAxis{0.0, 1.0, 41}, LatticeAxis{0.0, 1.0, 41}});
  const auto cdf = posterior_cdf_uniform_prior(like, {{0.0, 0.0}, {1.0, 1.0}}, lattice);
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  double worst = 0.0;
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    const auto s = lattice.node(f);
    worst = std::max(worst, std::abs(cdf.values[f] - phi((s[0] - m0) / s0) * phi((s[1] - m1) / s1)));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(ExactPosterior, SisNormalizedAndStableUnderRefinement) {
  Rng rng(1);
  const auto data = sis_simulate({0.003, 0.1}, 100, 1, sis_default_observation_times(), rng);
  const Lattice lattice({LatticeAxis{0.0, 0.06, 25}, LatticeAxis{0.0, 2.0, 25}});
  QuadratureOptions coarse;
  coarse.fine_points = 120;
  coarse.scan_points = 32;
  QuadratureOptions fine = coarse;
  fine.fine_points = 240;
  const auto a = sis_exact_posterior_cdf(data, 100, 101, Prior::sis_default(), lattice, coarse);
  const auto b = sis_exact_posterior_cdf(data, 100, 101, Prior::sis_default(), lattice, fine);
  EXPECT_NEAR(a.values.back(), 1.0, 1e-6);
  double diff = 0.0;
  for (std::size_t f = 0; f < a.values.size(); ++f) diff = std::max(diff, std::abs(a.values[f] - b.values[f]));
  // Trapezoid error is O(h^2): halving h must change the result by little.
  EXPECT_LT(diff, 5e-3);
  for (std::size_t f = 0; f < a.values.size(); ++f) {
    const auto idx = lattice.unflatten(f);
    if (idx[0] > 0) EXPECT_GE(a.values[f] + 1e-12, a.values[f - lattice.stride(0)]);
    if (idx[1] > 0) EXPECT_GE(a.values[f] + 1e-12, a.values[f - 1]);
  }
}
