#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mlabc/error.hpp"
#include "mlabc/mlmc/coupling.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/mlmc/smoothing.hpp"
#include "test_support.hpp"

using namespace mlabc;

namespace {

// Direct evaluation of the smoothed eCDF at every node, no prefix sums.
std::vector<double> brute_force_cdf(const std::vector<ParameterVector>& samples,
                                    const Lattice& lattice) {
  const auto delta = lattice.spacings();
  std::vector<double> out(lattice.size(), 0.0);
  for (std::size_t f = 0; f < lattice.size(); ++f) {
    const auto s = lattice.node(f);
    for (const auto& t : samples) {
      double g = 1.0;
      for (std::size_t j = 0; j < s.size(); ++j) g *= smoothing_xi((t[j] - s[j]) / delta[j]);
      out[f] += g;
    }
    out[f] /= static_cast<double>(samples.size());
  }
  return out;
}

std::vector<ParameterVector> uniform_points(std::size_t n, std::size_t k, double lo, double hi,
                                            Rng& rng) {
  std::vector<ParameterVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    ParameterVector p(k);
    for (std::size_t j = 0; j < k; ++j) p[j] = rng.uniform(lo, hi);
    out.push_back(p);
  }
  return out;
}

bool axis_monotone(const LatticeCdf& cdf) {
  const auto& lat = cdf.lattice;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const auto idx = lat.unflatten(f);
    for (std::size_t j = 0; j < lat.dimension(); ++j) {
      if (idx[j] > 0 && cdf.values[f] < cdf.values[f - lat.stride(j)]) return false;
    }
  }
  return true;
}

MarginalCdf uniform_marginal(double lo, double hi, std::size_t n) {
  MarginalCdf m;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    m.nodes.push_back(x);
    m.values.push_back((x - lo) / (hi - lo));
  }
  return m;
}

}  // namespace

TEST(Xi, PiecewiseValues) {
  EXPECT_EQ(smoothing_xi(-1.0), 1.0);
  EXPECT_EQ(smoothing_xi(1.0), 0.0);
  EXPECT_EQ(smoothing_xi(-7.0), 1.0);
  EXPECT_EQ(smoothing_xi(3.0), 0.0);
  EXPECT_EQ(smoothing_xi(0.0), 0.5);
  const double r = std::sqrt(0.6);
  EXPECT_NEAR(smoothing_xi(-r), 1.080948, 1e-6);
  EXPECT_NEAR(smoothing_xi(r), 1.0 - 1.080948, 1e-6);
}

TEST(Xi, ExtremumIsGlobal) {
  const double peak = smoothing_xi(-std::sqrt(0.6));
  for (int i = 0; i <= 20000; ++i) {
    const double x = -1.5 + 3.0 * i / 20000.0;
    EXPECT_LE(smoothing_xi(x), peak + 1e-15);
    EXPECT_GE(smoothing_xi(x), 1.0 - peak - 1e-15);
  }
}

TEST(Xi, ReflectionIdentity) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-3.0, 3.0);
    EXPECT_NEAR(smoothing_xi(x) + smoothing_xi(-x), 1.0, 1e-15);
  }
}

TEST(Xi, Continuous) {
  for (double x : {-1.0, 1.0}) {
    EXPECT_NEAR(smoothing_xi(x - 1e-9), smoothing_xi(x + 1e-9), 1e-8);
  }
}

TEST(SmoothedIndicator, ExactOutsideBand) {
  Rng rng(2);
  const std::vector<double> s{0.5, 1.0, -2.0};
  const std::vector<double> d{0.1, 0.2, 0.05};
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> theta(3);
    for (std::size_t j = 0; j < 3; ++j) theta[j] = s[j] - d[j] - rng.uniform(0.0, 2.0);
    EXPECT_EQ(smoothed_indicator(theta, s, d), 1.0);
    const std::size_t j = rng.below(3);
    theta[j] = s[j] + d[j] + rng.uniform(0.0, 2.0);
    EXPECT_EQ(smoothed_indicator(theta, s, d), 0.0);
    // (s + d - s) / d can round to just below 1
    theta[j] = s[j] + d[j];
    EXPECT_NEAR(smoothed_indicator(theta, s, d), 0.0, 1e-12);
  }
}

TEST(SmoothedIndicator, AtNodeIsQuarterInTwoDimensions) {
  const std::vector<double> s{0.3, 0.7}, d{0.1, 0.1};
  EXPECT_DOUBLE_EQ(smoothed_indicator(s, s, d), 0.25);
}

TEST(LevelCdf, FarAboveAndBelow) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 21}, LatticeAxis{0.0, 1.0, 21}});
  const std::vector<ParameterVector> one{{0.5, 0.5}};
  const auto cdf = level_cdf(one, lat);
  EXPECT_EQ(cdf.values.back(), 1.0);
  EXPECT_EQ(cdf.values.front(), 0.0);
  EXPECT_FALSE(cdf.adjusted);
}

TEST(LevelCdf, OneDimensionalExample) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}});
  const std::vector<ParameterVector> s{{0.25}, {0.75}};
  const auto cdf = level_cdf(s, lat);
  EXPECT_DOUBLE_EQ(cdf.values[5], 0.5);
}

TEST(LevelCdf, MatchesDirectEvaluation) {
  Rng rng(3);
  for (std::size_t k : {1u, 2u, 3u}) {
    std::vector<LatticeAxis> axes;
    for (std::size_t j = 0; j < k; ++j) axes.push_back({-1.0 + j, 2.0 + j, 9 + 3 * j});
    const Lattice lat(axes);
    std::vector<ParameterVector> s;
    for (int i = 0; i < 60; ++i) {
      ParameterVector p(k);
      for (std::size_t j = 0; j < k; ++j) p[j] = rng.uniform(-1.2 + j, 2.2 + j);
      s.push_back(p);
    }
    // a few exactly on nodes and on the box edge
    ParameterVector on(k);
    for (std::size_t j = 0; j < k; ++j) on[j] = lat.axis(j).node(3);
    s.push_back(on);
    for (std::size_t j = 0; j < k; ++j) on[j] = lat.axis(j).lo;
    s.push_back(on);
    const auto fast = level_cdf(s, lat);
    const auto slow = brute_force_cdf(s, lat);
    for (std::size_t f = 0; f < lat.size(); ++f) ASSERT_NEAR(fast.values[f], slow[f], 1e-12) << k;
  }
}

TEST(LevelCdf, OutOfRangeSamplesAreCounted) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}});
  const std::vector<ParameterVector> s{{-0.5}, {0.5}, {1.5}};
  const auto cdf = level_cdf(s, lat);
  EXPECT_EQ(cdf.out_of_range, 2u);
  EXPECT_DOUBLE_EQ(cdf.values.front(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cdf.values.back(), 2.0 / 3.0);
}

TEST(LevelCdf, EmptyThrows) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}});
  EXPECT_THROW(level_cdf(std::vector<ParameterVector>{}, lat), InvalidArgument);
}

TEST(LevelCdf, RangeAndAdjustedValidity) {
  Rng rng(4);
  const Lattice lat({LatticeAxis{0.0, 1.0, 17}, LatticeAxis{0.0, 1.0, 13}});
  const double peak = smoothing_xi(-std::sqrt(0.6));
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = uniform_points(1 + rng.below(20), 2, 0.0, 1.0, rng);
    const auto raw = level_cdf(s, lat);
    for (double v : raw.values) {
      ASSERT_LE(v, peak * peak + 1e-12);
      ASSERT_GE(v, (1.0 - peak) * peak - 1e-12);
    }
    const auto adj = monotonicity_adjust(raw);
    EXPECT_TRUE(adj.adjusted);
    EXPECT_TRUE(axis_monotone(adj));
    for (double v : adj.values) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(MonotonicityAdjust, Examples) {
  LatticeCdf one{Lattice({LatticeAxis{0.0, 1.0, 3}}), {0.2, 0.1, 0.3}};
  EXPECT_EQ(monotonicity_adjust(one).values, (std::vector<double>{0.2, 0.2, 0.3}));
  LatticeCdf high{Lattice({LatticeAxis{0.0, 1.0, 2}}), {0.4, 1.05}};
  EXPECT_EQ(monotonicity_adjust(high).values, (std::vector<double>{0.4, 1.0}));
  LatticeCdf ok{Lattice({LatticeAxis{0.0, 1.0, 2}, LatticeAxis{0.0, 1.0, 2}}), {0.0, 0.1, 0.3, 1.0}};
  EXPECT_EQ(monotonicity_adjust(ok).values, ok.values);
}

TEST(MonotonicityAdjust, IdempotentAndNeverLowersClampedValue) {
  Rng rng(5);
  const Lattice lat({LatticeAxis{0.0, 1.0, 6}, LatticeAxis{0.0, 1.0, 5}, LatticeAxis{0.0, 1.0, 4}});
  for (int rep = 0; rep < 200; ++rep) {
    LatticeCdf c{lat, std::vector<double>(lat.size())};
    for (auto& v : c.values) v = rng.uniform(-0.2, 1.2);
    const auto once = monotonicity_adjust(c);
    const auto twice = monotonicity_adjust(once);
    EXPECT_EQ(once.values, twice.values);
    EXPECT_TRUE(axis_monotone(once));
    for (std::size_t f = 0; f < lat.size(); ++f) {
      EXPECT_GE(once.values[f], std::clamp(c.values[f], 0.0, 1.0));
    }
  }
}

TEST(Marginals, OneDimensionalEqualsJoint) {
  LatticeCdf c{Lattice({LatticeAxis{0.0, 1.0, 4}}), {0.1, 0.4, 0.4, 0.9}, true};
  const auto m = marginal_cdfs(c);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].values, c.values);
  EXPECT_EQ(m[0].nodes, c.lattice.axis(0).coordinates());
}

TEST(Marginals, ProductFormRecoversFactor) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 5}, LatticeAxis{0.0, 2.0, 4}});
  const std::vector<double> f1{0.0, 0.1, 0.5, 0.7, 0.9}, f2{0.2, 0.3, 0.6, 1.0};
  LatticeCdf c{lat, {}, true};
  for (double a : f1) {
    for (double b : f2) c.values.push_back(a * b);
  }
  const auto m = marginal_cdfs(c);
  EXPECT_EQ(m[0].values, f1);
  EXPECT_EQ(m[0].axis, 0u);
  EXPECT_EQ(m[1].axis, 1u);
  for (std::size_t i = 0; i < f2.size(); ++i) EXPECT_DOUBLE_EQ(m[1].values[i], 0.9 * f2[i]);
}

TEST(Marginals, NondecreasingAndEndAtCorner) {
  Rng rng(6);
  const Lattice lat({LatticeAxis{0.0, 1.0, 7}, LatticeAxis{0.0, 1.0, 9}});
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = monotonicity_adjust(level_cdf(uniform_points(30, 2, -0.1, 1.1, rng), lat));
    for (const auto& m : marginal_cdfs(c)) {
      EXPECT_TRUE(std::is_sorted(m.values.begin(), m.values.end()));
      EXPECT_EQ(m.values.back(), c.values.back());
    }
  }
}

TEST(InverseMarginal, Examples) {
  MarginalCdf m{0, {0.0, 1.0}, {0.25, 1.0}};
  EXPECT_DOUBLE_EQ(inverse_marginal(m, 0.625), 0.5);
  EXPECT_DOUBLE_EQ(inverse_marginal(m, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(inverse_marginal(m, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(inverse_marginal(m, 1.0), 1.0);
  MarginalCdf n{0, {0.0, 1.0, 2.0, 3.0}, {0.1, 0.4, 0.4, 0.8}};
  EXPECT_DOUBLE_EQ(inverse_marginal(n, 0.4), 1.0);  // flat segment: leftmost abscissa
  EXPECT_DOUBLE_EQ(inverse_marginal(n, 0.6), 2.5);
  EXPECT_DOUBLE_EQ(inverse_marginal(n, 0.9), 3.0);
}

TEST(InverseMarginal, InvertsStrictlyIncreasingInterpolant) {
  Rng rng(7);
  MarginalCdf m;
  double v = 0.0;
  for (int i = 0; i < 30; ++i) {
    m.nodes.push_back(i * 0.1);
    v += rng.uniform(0.001, 0.05);
    m.values.push_back(v);
  }
  for (int rep = 0; rep < 500; ++rep) {
    const double x = rng.uniform(0.0, 2.9);
    EXPECT_NEAR(inverse_marginal(m, m.evaluate(x)), x, 1e-10);
  }
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    EXPECT_NEAR(inverse_marginal(m, m.values[i]), m.nodes[i], 1e-12);
  }
}

TEST(Coupling, IdenticalMarginalsGiveIdentityOnNodes) {
  const auto m = uniform_marginal(0.0, 1.0, 11);
  std::vector<ParameterVector> s;
  for (double x : m.nodes) s.push_back({x});
  const auto matched = couple_samples(s, {m}, {m});
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(matched[i][0], s[i][0], 1e-12);
}

TEST(Coupling, UniformShift) {
  Rng rng(8);
  const auto from = uniform_marginal(0.0, 1.0, 101);
  const auto to = uniform_marginal(1.0, 2.0, 101);
  const auto s = uniform_points(1000, 1, 0.0, 1.0, rng);
  const auto matched = couple_samples(s, {from}, {to});
  ASSERT_EQ(matched.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(matched[i][0], s[i][0] + 1.0, 1e-9);
}

TEST(Coupling, ConstantAccumulatedMarginalMapsToFirstNode) {
  const auto from = uniform_marginal(0.0, 1.0, 11);
  MarginalCdf flat{0, from.nodes, std::vector<double>(from.nodes.size(), 1.0)};
  const std::vector<ParameterVector> s{{0.3}, {0.9}};
  for (const auto& p : couple_samples(s, {from}, {flat})) EXPECT_EQ(p[0], 0.0);
}

TEST(Coupling, ComponentwiseMonotoneMatching) {
  Rng rng(9);
  const Lattice lat({LatticeAxis{0.0, 1.0, 15}, LatticeAxis{0.0, 3.0, 12}});
  for (int rep = 0; rep < 50; ++rep) {
    const auto level = uniform_points(40, 2, 0.0, 1.0, rng);
    auto coarse = uniform_points(40, 2, 0.0, 1.0, rng);
    for (auto& p : coarse) p[1] *= 3.0;
    std::vector<MarginalCdf> lm;
    for (const auto& m : marginal_cdfs(level_cdf(level, lat))) lm.push_back(monotonicity_adjust(m));
    const auto acc = marginal_cdfs(monotonicity_adjust(level_cdf(coarse, lat)));
    const auto matched = couple_samples(level, lm, acc);
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = 0; b < level.size(); ++b) {
        for (std::size_t j = 0; j < 2; ++j) {
          if (level[a][j] <= level[b][j]) ASSERT_LE(matched[a][j], matched[b][j]);
        }
      }
    }
  }
}

TEST(Coupling, ExactInOneDimension) {
  // Matched samples follow the accumulated marginal: compare with direct draws.
  Rng rng(10);
  const LatticeAxis axis{0.0, 4.0, 401};
  const std::size_t n = 10000;
  std::vector<ParameterVector> level, target, direct;
  for (std::size_t i = 0; i < n; ++i) {
    level.push_back({rng.uniform(0.5, 2.5)});
    target.push_back({1.0 + rng.exponential(2.0)});
    direct.push_back({1.0 + rng.exponential(2.0)});
  }
  const Lattice lat({axis});
  const auto lm = monotonicity_adjust(marginal_cdfs(level_cdf(level, lat))[0]);
  const auto acc = marginal_cdfs(monotonicity_adjust(level_cdf(target, lat)));
  const auto matched = couple_samples(level, {lm}, acc);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back(matched[i][0]);
    b.push_back(std::min(direct[i][0], 4.0));
  }
  EXPECT_LT(mlabc::testing::ks_statistic(a, b), mlabc::testing::ks_critical_1pct(n, n));
}

TEST(BiasCorrection, IdenticalSamplesGiveZero) {
  Rng rng(11);
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}, LatticeAxis{0.0, 1.0, 11}});
  const auto s = uniform_points(50, 2, 0.0, 1.0, rng);
  for (double v : bias_correction(s, s, lat).values) EXPECT_EQ(v, 0.0);
}

TEST(BiasCorrection, SinglePairFarApart) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}, LatticeAxis{0.0, 1.0, 11}});
  const std::vector<ParameterVector> level{{0.9, 0.9}}, matched{{0.1, 0.1}};
  const auto y = bias_correction(level, matched, lat);
  EXPECT_DOUBLE_EQ(y.values[5 * 11 + 5], -1.0);
}

TEST(BiasCorrection, CountMismatchThrows) {
  const Lattice lat({LatticeAxis{0.0, 1.0, 11}});
  const std::vector<ParameterVector> a{{0.1}, {0.2}}, b{{0.1}};
  EXPECT_THROW(bias_correction(a, b, lat), InvalidArgument);
}

TEST(BiasCorrection, PairingReducesVariance) {
  // Coupled uniform shift: theta and theta + 0.05 versus independent draws.
  Rng rng(12);
  const Lattice lat({LatticeAxis{0.0, 1.2, 25}});
  const std::size_t node = 12;
  const std::size_t n = 2000;
  std::vector<double> paired, unpaired;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(), w = rng.uniform();
    paired.push_back(indicator_grid({u}, lat)[node] - indicator_grid({u + 0.05}, lat)[node]);
    unpaired.push_back(indicator_grid({u}, lat)[node] - indicator_grid({w + 0.05}, lat)[node]);
  }
  EXPECT_LT(mlabc::testing::sample_sd(paired), mlabc::testing::sample_sd(unpaired));
}

TEST(SmoothedAxisCdf, EqualsOneDimensionalLevelCdf) {
  Rng rng(13);
  const auto s = uniform_points(200, 3, 0.0, 1.0, rng);
  const LatticeAxis axis{0.0, 1.0, 31};
  const auto m = smoothed_axis_cdf(s, 1, axis);
  std::vector<ParameterVector> proj;
  for (const auto& p : s) proj.push_back({p[1]});
  const auto c = level_cdf(proj, Lattice({axis}));
  for (std::size_t i = 0; i < axis.nodes; ++i) EXPECT_NEAR(m.values[i], c.values[i], 1e-12);
}
