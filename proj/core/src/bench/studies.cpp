#include "mlabc/bench/studies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mlabc/error.hpp"
#include "mlabc/mlmc/coupling.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/parallel.hpp"
#include "mlabc/random.hpp"

namespace mlabc::bench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_real(v[i]);
  return s;
}

LatticeCdf reference_for(const ExperimentConfig& base, const Problem& problem,
                         std::optional<LatticeCdf> reference) {
  if (reference) return std::move(*reference);
  return build_reference(base, problem);
}

ConvergencePoint point_from_report(const RunReport& report, std::string sampler, std::size_t index,
                                   std::vector<double> thresholds, std::vector<std::size_t> allocations) {
  ConvergencePoint p;
  p.sampler = std::move(sampler);
  p.index = index;
  p.thresholds = std::move(thresholds);
  p.allocations = std::move(allocations);
  p.mean_cost = report.mean_n_s;
  p.rmse = report.rmse;
  p.failures = report.failures;
  for (const auto& r : report.replications) {
    if (!r.ok) continue;
    p.errors.push_back(r.sup_error);
    p.costs.push_back(r.n_s);
    p.seeds.push_back(r.seed);
  }
  return p;
}

SlopeFit fit_points(const std::vector<ConvergencePoint>& points) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points) xy.emplace_back(p.mean_cost, p.rmse);
  return fit_convergence_slope(xy);
}

}  // namespace

ConvergenceResult run_convergence_study(const ConvergenceStudy& study, const std::filesystem::path& out_dir,
                                        std::optional<LatticeCdf> reference) {
  if (study.rejection_thresholds.size() != study.rejection_samples.size()) {
    throw ConfigError("convergence study: one sample count per rejection threshold");
  }
  ExperimentConfig base = study.base;
  base.replications = study.replications;
  base.write_samples = false;
  const Problem problem = build_problem(base);
  const LatticeCdf ref = reference_for(base, problem, std::move(reference));
  std::filesystem::create_directories(out_dir);
  save_lattice_cdf(ref, problem.names, out_dir / "reference.csv");

  ConvergenceResult result;
  for (std::size_t i = 0; i < study.rejection_thresholds.size(); ++i) {
    ExperimentConfig c = base;
    c.name = "rejection_" + std::to_string(i + 1);
    c.sampler = "rejection";
    c.schedule.kind = ScheduleSpec::Kind::List;
    c.schedule.values = {study.rejection_thresholds[i]};
    c.samples = study.rejection_samples[i];
    c.seed = derive_seed(study.seed, {1, i + 1});
    const RunReport rep = run_experiment(c, out_dir / c.name, {}, ref);
    result.rejection.push_back(point_from_report(rep, "rejection", i + 1, c.schedule.values, {c.samples}));
  }

  // one trial run on the deepest schedule; shallower runs use its prefix
  ExperimentConfig deepest = base;
  deepest.sampler = "mlmc";
  deepest.schedule = ScheduleSpec{ScheduleSpec::Kind::Geometric, study.mlmc_first, study.mlmc_ratio, 0.0,
                                  study.mlmc_max_levels, {}};
  deepest.trial_samples = study.trial_samples;
  deepest.trial_seed = study.trial_seed;
  deepest.target_rmse = 1.0;
  const Problem deep_problem = build_problem(deepest);
  result.trial = plan_mlmc(deepest, deep_problem);
  write_csv(plan_table(result.trial), out_dir / "trial.csv");

  for (std::size_t L = 1; L <= study.mlmc_max_levels; ++L) {
    LevelPlan prefix;
    prefix.thresholds.assign(result.trial.thresholds.begin(), result.trial.thresholds.begin() + L);
    prefix.variances.assign(result.trial.variances.begin(), result.trial.variances.begin() + L);
    prefix.costs.assign(result.trial.costs.begin(), result.trial.costs.begin() + L);
    AllocationOptions ao;
    ao.min_samples = base.min_samples;
    const auto alloc = optimal_allocation(prefix, study.kappa * prefix.thresholds.back(), ao);

    ExperimentConfig c = deepest;
    c.name = "mlmc_L" + std::to_string(L);
    c.schedule.levels = L;
    c.allocations = alloc;
    c.target_rmse.reset();
    c.seed = derive_seed(study.seed, {2, L});
    const RunReport rep = run_experiment(c, out_dir / c.name, {}, ref);
    result.mlmc.push_back(point_from_report(rep, "mlmc", L, prefix.thresholds, alloc));
  }

  result.rejection_slope = fit_points(result.rejection);
  result.mlmc_slope = fit_points(result.mlmc);

  CsvTable points{{"sampler", "point", "thresholds", "allocations", "replications", "failures", "mean_cost", "rmse"}, {}};
  for (const auto* set : {&result.rejection, &result.mlmc}) {
    for (const auto& p : *set) {
      points.rows.push_back({p.sampler, std::to_string(p.index), join_reals(p.thresholds), join_sizes(p.allocations),
                             std::to_string(p.errors.size() + p.failures), std::to_string(p.failures),
                             format_real(p.mean_cost), format_real(p.rmse)});
    }
  }
  write_csv(points, out_dir / "points.csv");
  CsvTable slopes{{"sampler", "slope", "ci_low", "ci_high", "ci_defined", "points"}, {}};
  for (const auto& [name, fit] : {std::pair{"rejection", result.rejection_slope}, std::pair{"mlmc", result.mlmc_slope}}) {
    slopes.rows.push_back({name, format_real(fit.slope), format_real(fit.ci_low), format_real(fit.ci_high),
                           fit.ci_defined ? "true" : "false", std::to_string(fit.points)});
  }
  write_csv(slopes, out_dir / "slopes.csv");
  return result;
}

TwoLevelEstimates two_level_estimates(const SampleSet& coarse, const SampleSet& fine,
                                      const SampleSet& coarse_partners, const Lattice& lattice) {
  const LatticeCdf first = monotonicity_adjust(level_cdf(coarse, lattice));
  const LatticeCdf raw = level_cdf(fine, lattice);
  auto level_marginals = marginal_cdfs(raw);
  for (auto& m : level_marginals) m = monotonicity_adjust(std::move(m));
  const auto matched = couple_samples(fine.samples, level_marginals, marginal_cdfs(first));

  auto combine = [&](const LatticeCdf& partner) {
    LatticeCdf out = first;
    for (std::size_t f = 0; f < out.values.size(); ++f) out.values[f] += raw.values[f] - partner.values[f];
    out.adjusted = false;
    return out;
  };
  LatticeCdf c = combine(level_cdf(matched, lattice));
  LatticeCdf u = combine(level_cdf(coarse_partners, lattice));
  return {monotonicity_adjust(c), monotonicity_adjust(u), std::move(c), std::move(u)};
}

BiasResult run_bias_study(const BiasStudy& study, const std::filesystem::path& out_dir,
                          std::optional<LatticeCdf> reference) {
  for (double m : study.factors) {
    if (!(m > 1.0)) throw ConfigError("bias study: factors must exceed 1");
  }
  const Problem problem = build_problem(study.base);
  const LatticeCdf ref = reference_for(study.base, problem, std::move(reference));
  const RejectionOptions ro{study.base.workers, study.base.budget_cap};

  BiasResult result;
  for (std::size_t r = 0; r < study.replications; ++r) {
    const std::uint64_t s = derive_seed(study.seed, {r});
    // same sub-streams as mlmc_abc_cdf with seed s: level l uses {l},
    // the independent partners of level 2 use {2, 1}
    const SampleSet fine = abc_rejection(problem.prior, std::nullopt, *problem.model, study.finest,
                                         study.samples, derive_seed(s, {2}), ro);
    for (double m : study.factors) {
      const double eps = m * study.finest;
      const SampleSet coarse = abc_rejection(problem.prior, std::nullopt, *problem.model, eps, study.samples,
                                             derive_seed(s, {1}), ro);
      const SampleSet partners = abc_rejection(problem.prior, std::nullopt, *problem.model, eps,
                                               study.samples, derive_seed(s, {2, 1}), ro);
      const auto est = two_level_estimates(coarse, fine, partners, problem.lattice);
      result.rows.push_back({r, s, m, sup_distance(est.coupled_sum, est.uncoupled_sum),
                             sup_distance(est.coupled, est.uncoupled), sup_distance(est.coupled, ref),
                             coarse.cost.steps() + fine.cost.steps() + partners.cost.steps()});
    }
  }
  for (double m : study.factors) {
    std::vector<double> b, e;
    for (const auto& row : result.rows) {
      if (row.factor == m) {
        b.push_back(row.bias);
        e.push_back(row.abc_error);
      }
    }
    result.median_bias.push_back(median(b));
    result.median_abc_error.push_back(median(e));
  }

  std::filesystem::create_directories(out_dir);
  CsvTable rows{{"replication", "seed", "factor", "coarse_threshold", "fine_threshold", "bias", "bias_adjusted",
                 "abc_error", "n_s"},
                {}};
  for (const auto& row : result.rows) {
    rows.rows.push_back({std::to_string(row.replication), std::to_string(row.seed), format_real(row.factor),
                         format_real(row.factor * study.finest), format_real(study.finest), format_real(row.bias),
                         format_real(row.bias_adjusted), format_real(row.abc_error), std::to_string(row.cost)});
  }
  write_csv(rows, out_dir / "bias.csv");
  CsvTable summary{{"factor", "median_bias", "median_abc_error"}, {}};
  for (std::size_t i = 0; i < study.factors.size(); ++i) {
    summary.rows.push_back({format_real(study.factors[i]), format_real(result.median_bias[i]),
                            format_real(result.median_abc_error[i])});
  }
  write_csv(summary, out_dir / "bias_summary.csv");
  return result;
}

ParityResult run_parity_study(const ParityStudy& study, const std::filesystem::path& out_dir,
                              std::optional<LatticeCdf> reference) {
  const Problem problem = build_problem(study.base);
  const LatticeCdf ref = reference_for(study.base, problem, std::move(reference));
  std::filesystem::create_directories(out_dir);
  const unsigned workers = study.base.workers;

  ParityResult result;
  auto record = [&](std::size_t finest, std::size_t r, const ExperimentConfig& c, const ReplicationResult& rr) {
    result.rows.push_back({finest, r, c.sampler, rr.seed, c.samples, rr.n_s, rr.sup_error, rr.ok, rr.error,
                           rr.invariant_violations});
  };
  for (std::size_t j = 0; j < study.finest_samples.size(); ++j) {
    const std::size_t finest = study.finest_samples[j];
    ExperimentConfig ml = study.base;
    ml.sampler = "mlmc";
    ml.samples = finest;
    ml.scale_to_finest = true;
    ml.allocations.clear();
    ml.target_rmse.reset();
    const LevelPlan plan = plan_mlmc(ml, problem);
    result.plans.push_back(plan);
    write_csv(plan_table(plan), out_dir / ("plan_" + std::to_string(finest) + ".csv"));

    for (std::size_t r = 0; r < study.replications; ++r) {
      const auto m = run_replication(ml, problem, plan, ref, r, derive_seed(study.seed, {j, r, 1}), workers);
      record(finest, r, ml, m);

      ExperimentConfig mc = study.base;
      mc.sampler = "mcmc";
      const std::uint64_t mc_seed = derive_seed(study.seed, {j, r, 2});
      if (m.ok) {
        // out-of-support proposals cost nothing, so N_T is tuned until the
        // chain's N_s sits within the tolerance of the MLMC run
        const double target = static_cast<double>(m.n_s);
        mc.samples = std::max<std::size_t>(1, m.n_s);
        ReplicationResult best;
        for (int attempt = 0; attempt < 8; ++attempt) {
          best = run_replication(mc, problem, std::nullopt, ref, r, mc_seed, workers);
          if (!best.ok) break;
          const double got = static_cast<double>(best.n_s);
          if (std::abs(got - target) <= study.cost_tolerance * target) break;
          const double chain = static_cast<double>(best.stage_costs.back());
          const double want = std::max(1.0, target - static_cast<double>(best.stage_costs.front()));
          const double per_iteration = std::max(chain, 1.0) / static_cast<double>(mc.samples);
          mc.samples = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(want / per_iteration)));
        }
        if (best.ok && std::abs(static_cast<double>(best.n_s) - target) > study.cost_tolerance * target) {
          best.ok = false;
          best.error = "could not match the MLMC cost within tolerance";
        }
        record(finest, r, mc, best);
      } else {
        mc.samples = 0;
        ReplicationResult skipped;
        skipped.seed = mc_seed;
        skipped.error = "paired MLMC run failed";
        skipped.sup_error = kNaN;
        record(finest, r, mc, skipped);
      }

      if (study.run_smc) {
        ExperimentConfig sm = study.base;
        sm.sampler = "smc";
        sm.samples = study.smc_particles;
        const auto s = run_replication(sm, problem, std::nullopt, ref, r, derive_seed(study.seed, {j, r, 3}), workers);
        record(finest, r, sm, s);
      }
    }
  }

  CsvTable t{{"finest_samples", "replication", "sampler", "seed", "samples", "n_s", "sup_error", "status", "error"}, {}};
  for (const auto& row : result.rows) {
    std::string err = row.error;
    for (const auto& v : row.invariant_violations) err += (err.empty() ? "" : "; ") + v;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    t.rows.push_back({std::to_string(row.finest), std::to_string(row.replication), row.sampler,
                      std::to_string(row.seed), std::to_string(row.samples), std::to_string(row.n_s),
                      format_real(row.sup_error),
                      row.ok ? (row.invariant_violations.empty() ? "ok" : "invariant") : "error", err});
  }
  write_csv(t, out_dir / "parity.csv");
  save_lattice_cdf(ref, problem.names, out_dir / "reference.csv");
  return result;
}

std::vector<std::pair<std::size_t, std::size_t>> parity_wins(const ParityResult& result) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& a : result.rows) {
    if (a.sampler != "mlmc") continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == a.finest; });
    if (it == out.end()) {
      out.emplace_back(a.finest, 0);
      it = out.end() - 1;
    }
    for (const auto& b : result.rows) {
      if (b.sampler == "mcmc" && b.finest == a.finest && b.replication == a.replication && a.ok && b.ok &&
          a.sup_error <= b.sup_error) {
        ++it->second;
      }
    }
  }
  return out;
}

std::vector<Preset> presets() {
  return {
      {"fig1", "SIS: RMSE against cost for rejection (4 budgets) and MLMC (L = 1..3), 20 replications, exact reference"},
      {"fig2", "SIS: coupling bias for m = 4, 3, 2, 1.5 with 10^4 samples per level, 10 seeds"},
      {"table1", "TB: MLMC, MCMC and SMC with the naive kernel, N_L = 25, 50, 100, 10 seeds"},
      {"table2", "TB: as table1 with the tuned kernel"},
  };
}

ExperimentConfig sis_base_config() {
  ExperimentConfig c;
  c.name = "sis";
  c.model = "sis";
  c.lattice_nodes = {100};
  c.reference_kind = "exact";
  return c;
}

ExperimentConfig tb_base_config() {
  ExperimentConfig c;
  c.name = "tb";
  c.model = "tb";
  c.kernel = "naive";
  c.schedule = ScheduleSpec{ScheduleSpec::Kind::Recursive, 1.0, 2.0, 0.04, 6, {}};
  c.lattice_nodes = {40};
  c.reference_kind = "rejection";
  c.reference_samples = 10'000;
  c.reference_threshold = 0.04;
  return c;
}

ConvergenceStudy fig1_study() {
  ConvergenceStudy s;
  s.base = sis_base_config();
  return s;
}

BiasStudy fig2_study() {
  BiasStudy s;
  s.base = sis_base_config();
  return s;
}

ParityStudy table_study(const std::string& kernel) {
  ParityStudy s;
  s.base = tb_base_config();
  s.base.kernel = kernel;
  s.finest_samples = {25, 50, 100};
  return s;
}

void run_preset(const std::string& name, const std::filesystem::path& out_dir,
                const std::optional<std::uint64_t>& seed, const std::optional<unsigned>& workers,
                const std::optional<std::uint64_t>& budget_cap) {
  auto apply = [&](ExperimentConfig& c, std::uint64_t& study_seed) {
    if (seed) study_seed = *seed;
    if (workers) c.workers = *workers;
    if (budget_cap) c.budget_cap = *budget_cap;
  };
  if (name == "fig1") {
    auto s = fig1_study();
    apply(s.base, s.seed);
    run_convergence_study(s, out_dir);
  } else if (name == "fig2") {
    auto s = fig2_study();
    apply(s.base, s.seed);
    run_bias_study(s, out_dir);
  } else if (name == "table1" || name == "table2") {
    auto s = table_study(name == "table1" ? "naive" : "tuned");
    apply(s.base, s.seed);
    if (s.base.reference_file.empty()) s.base.reference_file = (out_dir / "reference_cache.csv").string();
    run_parity_study(s, out_dir);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

}  // namespace mlabc::bench
