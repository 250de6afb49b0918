#include "mlabc/mlmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mlabc/error.hpp"
#include "mlabc/logging.hpp"
#include "mlabc/mlmc/ecdf.hpp"

namespace mlabc {
namespace {

constexpr std::uint64_t kPartnerStream = 1;

void check_inputs(const Prior& prior, const AbcModel& model, const std::vector<double>& thresholds,
                  const std::vector<std::size_t>& allocations, std::size_t dimension) {
  validate_thresholds(thresholds);
  if (allocations.size() != thresholds.size()) {
    throw InvalidArgument("mlmc: one allocation per level required");
  }
  for (auto n : allocations) {
    if (n < 1) throw InvalidArgument("mlmc: allocations must be >= 1");
  }
  if (prior.dimension() != model.dimension() || prior.dimension() != dimension) {
    throw InvalidArgument("mlmc: prior, model and grid dimensions differ");
  }
}

// Rejection sampling for one level, charged against the run-wide budget.
SampleSet draw_level(const Prior& prior, const std::optional<BoundingBox>& box,
                     const AbcModel& model, double epsilon, std::size_t n, std::uint64_t seed,
                     const MlmcOptions& options, std::uint64_t& spent, std::size_t level) {
  RejectionOptions ro{options.workers, options.budget_cap > spent ? options.budget_cap - spent : 0};
  if (ro.budget_cap == 0) {
    throw BudgetExhausted("mlmc: budget exhausted before level " + std::to_string(level), SampleSet{});
  }
  try {
    SampleSet s = abc_rejection(prior, box, model, epsilon, n, seed, ro);
    spent += s.cost.steps();
    return s;
  } catch (const BudgetExhausted& e) {
    throw BudgetExhausted("mlmc level " + std::to_string(level) + ": " + e.what(), e.partial());
  }
}

// Shared driver: samples and couples level by level. `on_level` sees the
// level samples and their coarse partners (empty at level 1).
template <class OnLevel>
std::vector<LevelReport> run_levels(const Prior& prior, const AbcModel& model,
                                    const std::vector<double>& thresholds,
                                    const std::vector<std::size_t>& allocations,
                                    std::uint64_t seed, const MlmcOptions& options,
                                    OnLevel&& couple_and_accumulate) {
  std::vector<LevelReport> reports;
  std::uint64_t spent = 0;
  std::optional<BoundingBox> previous_box;
  std::vector<ParameterVector> previous_samples;
  for (std::size_t l = 1; l <= thresholds.size(); ++l) {
    LevelReport rep;
    rep.level = l;
    rep.threshold = thresholds[l - 1];
    if (l > 1 && options.truncate_prior) rep.proposal_box = support_bounding_box(previous_samples);
    SampleSet level = draw_level(prior, rep.proposal_box, model, rep.threshold, allocations[l - 1],
                                 derive_seed(seed, {l}), options, spent, l);
    rep.samples = level.size();
    rep.simulations = level.cost.steps();

    std::vector<ParameterVector> partners;
    if (l > 1 && options.coupling == CouplingMode::Identity) {
      partners = level.samples;
    } else if (l > 1 && options.coupling == CouplingMode::Independent) {
      SampleSet fresh = draw_level(prior, previous_box, model, thresholds[l - 2], allocations[l - 1],
                                   derive_seed(seed, {l, kPartnerStream}), options, spent, l);
      rep.simulations += fresh.cost.steps();
      partners = std::move(fresh.samples);
    }
    previous_samples = level.samples;
    previous_box = rep.proposal_box;
    couple_and_accumulate(l, level, partners, rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<MarginalCdf> monotone_marginals(const LatticeCdf& cdf) {
  auto marginals = marginal_cdfs(cdf);
  for (auto& m : marginals) m = monotonicity_adjust(std::move(m));
  return marginals;
}

void report_out_of_range(const std::vector<LevelReport>& levels) {
  std::size_t outside = 0, total = 0;
  for (const auto& r : levels) {
    outside += r.out_of_range;
    total += r.samples;
  }
  if (outside > 0) {
    warn("mlmc: " + std::to_string(outside) + " of " + std::to_string(total) +
         " level samples fell outside the lattice and were clamped");
  }
}

}  // namespace

MlmcResult mlmc_abc_cdf(const Prior& prior, const AbcModel& model,
                        const std::vector<double>& thresholds,
                        const std::vector<std::size_t>& allocations, const Lattice& lattice,
                        std::uint64_t seed, const MlmcOptions& options) {
  check_inputs(prior, model, thresholds, allocations, lattice.dimension());
  MlmcResult result;
  auto step = [&](std::size_t l, SampleSet& level, std::vector<ParameterVector>& partners,
                  LevelReport& rep) {
    LatticeCdf raw = level_cdf(level, lattice);
    rep.out_of_range = raw.out_of_range;
    if (l == 1) {
      rep.correction_sup = sup_abs(raw.values);
      result.cdf = monotonicity_adjust(std::move(raw));
    } else {
      if (options.coupling == CouplingMode::MarginalMatching) {
        partners = couple_samples(level.samples, monotone_marginals(raw), marginal_cdfs(result.cdf));
      }
      const LatticeCdf coarse = level_cdf(partners, lattice);
      for (std::size_t f = 0; f < raw.values.size(); ++f) raw.values[f] -= coarse.values[f];
      rep.correction_sup = sup_abs(raw.values);
      for (std::size_t f = 0; f < raw.values.size(); ++f) result.cdf.values[f] += raw.values[f];
      result.cdf = monotonicity_adjust(std::move(result.cdf));
    }
    result.cost.add(rep.simulations);
    result.level_samples.push_back(std::move(level));
    result.matched.push_back(std::move(partners));
  };
  result.levels = run_levels(prior, model, thresholds, allocations, seed, options, step);
  report_out_of_range(result.levels);
  return result;
}

LevelPlan trial_run(const Prior& prior, const AbcModel& model,
                    const std::vector<double>& thresholds, const Lattice& lattice,
                    std::size_t c, std::uint64_t seed, const MlmcOptions& options) {
  if (c < 2) throw InvalidArgument("trial_run: need at least 2 trial samples per level");
  const std::vector<std::size_t> allocations(thresholds.size(), c);
  check_inputs(prior, model, thresholds, allocations, lattice.dimension());

  LevelPlan plan;
  plan.thresholds = thresholds;
  plan.allocations = allocations;
  LatticeCdf accumulated;
  auto step = [&](std::size_t l, SampleSet& level, std::vector<ParameterVector>& partners,
                  LevelReport& rep) {
    const std::size_t n = level.size();
    std::vector<double> sum(lattice.size(), 0.0), sum_sq(lattice.size(), 0.0);
    LatticeCdf raw = level_cdf(level, lattice);
    if (l > 1 && options.coupling == CouplingMode::MarginalMatching) {
      partners = couple_samples(level.samples, monotone_marginals(raw), marginal_cdfs(accumulated));
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> g = indicator_grid(level.samples[i], lattice);
      if (l > 1) {
        const std::vector<double> coarse = indicator_grid(partners[i], lattice);
        for (std::size_t f = 0; f < g.size(); ++f) g[f] -= coarse[f];
      }
      for (std::size_t f = 0; f < g.size(); ++f) {
        sum[f] += g[f];
        sum_sq[f] += g[f] * g[f];
      }
    }
    double v = 0.0;
    for (std::size_t f = 0; f < sum.size(); ++f) {
      const double mean = sum[f] / static_cast<double>(n);
      const double var = (sum_sq[f] - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
      v = std::max(v, var);
    }
    if (l == 1) {
      accumulated = monotonicity_adjust(std::move(raw));
    } else {
      for (std::size_t f = 0; f < sum.size(); ++f) accumulated.values[f] += sum[f] / static_cast<double>(n);
      accumulated = monotonicity_adjust(std::move(accumulated));
    }
    plan.variances.push_back(std::max(0.0, v));
    plan.tallies.push_back(rep.simulations);
    plan.costs.push_back(static_cast<double>(rep.simulations) / static_cast<double>(n));
  };
  run_levels(prior, model, thresholds, allocations, seed, options, step);
  return plan;
}

double ExpectationResult::standard_error() const {
  double var = 0.0;
  for (std::size_t l = 0; l < term_variances.size(); ++l) {
    var += term_variances[l] / static_cast<double>(levels[l].samples);
  }
  return std::sqrt(var);
}

ExpectationResult mlmc_abc_expectation(const std::function<double(const ParameterVector&)>& u,
                                       const Prior& prior, const AbcModel& model,
                                       const std::vector<double>& thresholds,
                                       const std::vector<std::size_t>& allocations,
                                       const std::vector<LatticeAxis>& axes, std::uint64_t seed,
                                       const MlmcOptions& options) {
  check_inputs(prior, model, thresholds, allocations, axes.size());
  ExpectationResult result;
  std::vector<MarginalCdf> accumulated;

  auto axis_cdfs = [&](const std::vector<ParameterVector>& samples) {
    std::vector<MarginalCdf> out;
    for (std::size_t j = 0; j < axes.size(); ++j) out.push_back(smoothed_axis_cdf(samples, j, axes[j]));
    return out;
  };

  auto step = [&](std::size_t l, SampleSet& level, std::vector<ParameterVector>& partners,
                  LevelReport& rep) {
    std::vector<MarginalCdf> level_marginals = axis_cdfs(level.samples);
    for (const auto& theta : level.samples) {
      for (std::size_t j = 0; j < axes.size(); ++j) {
        if (theta[j] < axes[j].lo || theta[j] > axes[j].hi) {
          ++rep.out_of_range;
          break;
        }
      }
    }
    const std::size_t n = level.size();
    std::vector<double> values(n);
    if (l == 1) {
      for (std::size_t i = 0; i < n; ++i) values[i] = u(level.samples[i]);
      accumulated.clear();
      for (auto& m : level_marginals) accumulated.push_back(monotonicity_adjust(std::move(m)));
    } else {
      if (options.coupling == CouplingMode::MarginalMatching) {
        std::vector<MarginalCdf> monotone;
        for (const auto& m : level_marginals) monotone.push_back(monotonicity_adjust(m));
        partners = couple_samples(level.samples, monotone, accumulated);
      }
      for (std::size_t i = 0; i < n; ++i) values[i] = u(level.samples[i]) - u(partners[i]);
      const std::vector<MarginalCdf> coarse = axis_cdfs(partners);
      for (std::size_t j = 0; j < axes.size(); ++j) {
        for (std::size_t i = 0; i < accumulated[j].values.size(); ++i) {
          accumulated[j].values[i] += level_marginals[j].values[i] - coarse[j].values[i];
        }
        accumulated[j] = monotonicity_adjust(std::move(accumulated[j]));
      }
    }
    // Shifted by the first value so that a constant U is reproduced exactly.
    double shift_sum = 0.0;
    for (double x : values) shift_sum += x - values.front();
    const double mean = values.front() + shift_sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    result.terms.push_back(mean);
    result.term_variances.push_back(n > 1 ? ss / static_cast<double>(n - 1) : 0.0);
    rep.correction_sup = std::abs(mean);
    result.cost.add(rep.simulations);
  };
  result.levels = run_levels(prior, model, thresholds, allocations, seed, options, step);
  result.estimate = std::accumulate(result.terms.begin(), result.terms.end(), 0.0);
  report_out_of_range(result.levels);
  return result;
}

}  // namespace mlabc
