#include "mlabc/bench/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "mlabc/abc/rejection.hpp"
#include "mlabc/bench/metrics.hpp"
#include "mlabc/error.hpp"
#include "mlabc/mlmc/ecdf.hpp"
#include "mlabc/mlmc/estimator.hpp"
#include "mlabc/parallel.hpp"
#include "mlabc/random.hpp"
#include "mlabc/samplers/mcmc.hpp"
#include "mlabc/samplers/smc.hpp"

namespace mlabc::bench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fill_uniform(ReplicationResult& r, const std::vector<ParameterVector>& samples,
                  const std::vector<double>& discrepancies, std::size_t level) {
  const double w = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    r.samples.push_back(samples[i]);
    r.levels.push_back(level);
    r.weights.push_back(w);
    r.discrepancies.push_back(i < discrepancies.size() ? discrepancies[i] : kNaN);
  }
}

void run_sampler(const ExperimentConfig& config, const Problem& problem,
                 const std::optional<LevelPlan>& plan, std::uint64_t seed, unsigned workers,
                 ReplicationResult& r) {
  const auto& eps = problem.thresholds;
  if (config.sampler == "rejection") {
    SampleSet s;
    try {
      s = abc_rejection(problem.prior, std::nullopt, *problem.model, eps.back(), config.samples, seed,
                        {workers, config.budget_cap});
    } catch (const BudgetExhausted& e) {
      r.n_s = e.partial().cost.steps();
      r.stage_costs = {r.n_s};
      throw;
    }
    r.stage_costs = {s.cost.steps()};
    r.estimate = monotonicity_adjust(level_cdf(s, problem.lattice));
    fill_uniform(r, s.samples, s.discrepancies, 1);
  } else if (config.sampler == "mlmc") {
    MlmcOptions o;
    o.workers = workers;
    o.budget_cap = config.budget_cap;
    o.truncate_prior = config.truncate_prior;
    o.coupling = config.coupling;
    MlmcResult m = mlmc_abc_cdf(problem.prior, *problem.model, plan->thresholds, plan->allocations,
                                problem.lattice, seed, o);
    for (const auto& lev : m.levels) r.stage_costs.push_back(lev.simulations);
    r.estimate = std::move(m.cdf);
    for (std::size_t l = 0; l < m.level_samples.size(); ++l) {
      fill_uniform(r, m.level_samples[l].samples, m.level_samples[l].discrepancies, l + 1);
    }
  } else if (config.sampler == "mcmc") {
    // the chain starts from one ABC rejection draw, charged to N_s
    const SampleSet init = abc_rejection(problem.prior, std::nullopt, *problem.model, eps.back(), 1,
                                         derive_seed(seed, {0}), {1, config.budget_cap});
    McmcOptions mo;
    mo.budget_cap = config.budget_cap - std::min(config.budget_cap, init.cost.steps());
    const MarkovChainTrace chain = mcmc_abc(init.samples.front(), make_kernel(config), problem.prior,
                                            *problem.model, eps.back(), config.samples,
                                            derive_seed(seed, {1}), mo);
    r.stage_costs = {init.cost.steps(), chain.cost.steps()};
    if (config.burn_in >= chain.states.size()) throw ConfigError("mcmc.burn_in leaves no states");
    const std::vector<ParameterVector> kept(chain.states.begin() + static_cast<std::ptrdiff_t>(config.burn_in),
                                            chain.states.end());
    r.estimate = monotonicity_adjust(level_cdf(kept, problem.lattice));
    fill_uniform(r, kept, {}, 1);
  } else {
    SmcOptions so;
    so.workers = workers;
    so.budget_cap = config.budget_cap;
    const SmcRun run = smc_abc(config.samples, eps, make_kernel(config), problem.prior, *problem.model,
                               seed, so);
    for (const auto& st : run.stages) r.stage_costs.push_back(st.cost.steps());
    r.invariant_violations = smc_invariant_violations(run, eps, config.samples, problem.prior);
    const auto& fin = run.final_stage();
    r.estimate = monotonicity_adjust(level_cdf(fin.particles, fin.weights, problem.lattice));
    r.samples = fin.particles;
    r.levels.assign(fin.particles.size(), 1);
    r.weights = fin.weights;
    r.discrepancies = fin.discrepancies;
  }
  r.n_s = std::accumulate(r.stage_costs.begin(), r.stage_costs.end(), std::uint64_t{0});
}

std::vector<std::string> with_replication(std::vector<std::string> header) {
  header.insert(header.begin(), "replication");
  return header;
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t master, std::size_t replication) {
  return derive_seed(master, {replication});
}

LevelPlan plan_mlmc(const ExperimentConfig& config, const Problem& problem) {
  LevelPlan plan;
  plan.thresholds = problem.thresholds;
  if (!config.allocations.empty()) {
    plan.allocations = config.allocations;
    plan.validate();
    return plan;
  }
  MlmcOptions o;
  o.workers = config.workers;
  o.budget_cap = config.budget_cap;
  o.truncate_prior = config.truncate_prior;
  o.coupling = config.coupling;
  plan = trial_run(problem.prior, *problem.model, problem.thresholds, problem.lattice,
                   config.trial_samples, config.trial_seed, o);
  AllocationOptions ao;
  ao.min_samples = config.min_samples;
  if (config.scale_to_finest) ao.finest_samples = config.samples;
  plan.allocations = optimal_allocation(plan, config.target_rmse.value_or(1.0), ao);
  plan.validate();
  return plan;
}

ReplicationResult run_replication(const ExperimentConfig& config, const Problem& problem,
                                  const std::optional<LevelPlan>& plan,
                                  const std::optional<LatticeCdf>& reference,
                                  std::size_t replication, std::uint64_t seed, unsigned workers) {
  ReplicationResult r;
  r.replication = replication;
  r.seed = seed;
  r.sampler = config.sampler;
  r.sup_error = kNaN;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (config.sampler == "mlmc" && !plan) throw InvalidArgument("mlmc replication without a plan");
    run_sampler(config, problem, plan, seed, workers, r);
    if (reference) r.sup_error = sup_distance(r.estimate, *reference);
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
    r.estimate = LatticeCdf{};
    r.samples.clear();
    r.levels.clear();
    r.weights.clear();
    r.discrepancies.clear();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

CsvTable report_table(const RunReport& report) {
  CsvTable t;
  t.header = {"name", "sampler", "replication", "seed", "status", "n_s", "sup_error", "error"};
  for (const auto& r : report.replications) {
    std::string error = r.error;
    for (const auto& v : r.invariant_violations) error += (error.empty() ? "" : "; ") + v;
    for (char& ch : error) {
      if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    t.rows.push_back({report.name, report.sampler, std::to_string(r.replication), std::to_string(r.seed),
                      r.ok ? (r.invariant_violations.empty() ? "ok" : "invariant") : "error",
                      std::to_string(r.n_s), format_real(r.sup_error), error});
  }
  return t;
}

CsvTable plan_table(const LevelPlan& plan) {
  CsvTable t;
  t.header = {"level", "threshold", "samples", "variance", "cost_per_sample", "trial_simulations"};
  for (std::size_t l = 0; l < plan.levels(); ++l) {
    auto opt = [&](const auto& v) { return l < v.size() ? format_real(static_cast<double>(v[l])) : std::string("nan"); };
    t.rows.push_back({std::to_string(l + 1), format_real(plan.thresholds[l]),
                      std::to_string(plan.allocations[l]), opt(plan.variances), opt(plan.costs),
                      l < plan.tallies.size() ? std::to_string(plan.tallies[l]) : std::string("0")});
  }
  return t;
}

RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         const std::filesystem::path& base_dir, std::optional<LatticeCdf> reference) {
  const Problem problem = build_problem(config, base_dir);
  if (!reference && config.reference_kind != "none") reference = build_reference(config, problem, base_dir);

  RunReport report;
  report.name = config.name;
  report.sampler = config.sampler;
  if (config.sampler == "mlmc") report.plan = plan_mlmc(config, problem);

  const std::size_t reps = config.replication_seed ? 1 : config.replications;
  const unsigned workers = config.workers == 0 ? default_workers() : config.workers;
  // replications in parallel when there are enough of them, else parallel inside each
  const unsigned outer = reps >= workers ? workers : 1;
  const unsigned inner = outer > 1 ? 1 : workers;
  report.replications.resize(reps);
  parallel_for(reps, outer, [&](std::size_t r) {
    const std::uint64_t seed = config.replication_seed ? *config.replication_seed : replication_seed(config.seed, r);
    report.replications[r] = run_replication(config, problem, report.plan, reference, r, seed, inner);
  });

  std::vector<double> errors;
  double n_s = 0.0;
  std::size_t ok = 0;
  for (const auto& r : report.replications) {
    if (!r.ok) {
      ++report.failures;
      continue;
    }
    ++ok;
    n_s += static_cast<double>(r.n_s);
    errors.push_back(r.sup_error);
  }
  report.mean_n_s = ok ? n_s / static_cast<double>(ok) : 0.0;
  report.rmse = (reference && !errors.empty()) ? rmse_from_errors(errors) : kNaN;

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream cfg(out_dir / "config.txt");
    cfg << config.to_text();
  }
  write_csv(report_table(report), out_dir / "report.csv");
  if (report.plan) write_csv(plan_table(*report.plan), out_dir / "plan.csv");
  if (reference) save_lattice_cdf(*reference, problem.names, out_dir / "reference.csv");

  CsvTable timing{{"replication", "wall_seconds"}, {}};
  CsvTable cdf, marginals, samples;
  samples.header = {"replication", "level", "index"};
  for (const auto& n : problem.names) samples.header.push_back(n);
  samples.header.insert(samples.header.end(), {"weight", "discrepancy"});
  for (const auto& r : report.replications) {
    const std::string rep = std::to_string(r.replication);
    timing.rows.push_back({rep, format_real(r.wall_seconds)});
    if (!r.ok) continue;
    CsvTable c = lattice_cdf_table(r.estimate, problem.names);
    if (cdf.header.empty()) cdf.header = with_replication(c.header);
    for (auto& row : c.rows) {
      row.insert(row.begin(), rep);
      cdf.rows.push_back(std::move(row));
    }
    auto margs = marginal_cdfs(r.estimate);
    CsvTable m = marginals_table(margs, problem.names);
    if (marginals.header.empty()) marginals.header = with_replication(m.header);
    for (auto& row : m.rows) {
      row.insert(row.begin(), rep);
      marginals.rows.push_back(std::move(row));
    }
    if (config.write_samples) {
      for (std::size_t i = 0; i < r.samples.size(); ++i) {
        std::vector<std::string> row{rep, std::to_string(r.levels[i]), std::to_string(i)};
        for (double x : r.samples[i]) row.push_back(format_real(x));
        row.push_back(format_real(r.weights[i]));
        row.push_back(format_real(r.discrepancies[i]));
        samples.rows.push_back(std::move(row));
      }
    }
  }
  if (cdf.header.empty()) {
    cdf.header = {"replication"};
    for (const auto& n : problem.names) cdf.header.push_back(n);
    cdf.header.push_back("value");
    marginals.header = {"replication", "parameter", "node", "value"};
  }
  write_csv(cdf, out_dir / "cdf.csv");
  write_csv(marginals, out_dir / "marginals.csv");
  if (config.write_samples) write_csv(samples, out_dir / "samples.csv");
  write_csv(timing, out_dir / "timing.csv");

  // drop the bulky per-replication data the caller rarely needs
  for (auto& r : report.replications) {
    r.samples.clear();
    r.levels.clear();
    r.weights.clear();
    r.discrepancies.clear();
  }
  return report;
}

CsvTable aggregate_reports(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("report: " + dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "report.csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  CsvTable out;
  out.header = {"experiment", "name", "sampler", "replications", "failures", "mean_n_s", "rmse"};
  for (const auto& f : files) {
    const CsvTable t = read_csv(f);
    const auto cn = t.column("name"), cs = t.column("sampler"), cst = t.column("status"),
               cnn = t.column("n_s"), ce = t.column("sup_error");
    std::size_t failures = 0, ok = 0;
    double n_s = 0.0;
    std::vector<double> errors;
    for (const auto& row : t.rows) {
      if (row[cst] == "error") {
        ++failures;
        continue;
      }
      ++ok;
      n_s += parse_real(row[cnn]);
      const double e = parse_real(row[ce]);
      if (!std::isnan(e)) errors.push_back(e);
    }
    const std::string name = t.rows.empty() ? "" : t.rows.front()[cn];
    const std::string sampler = t.rows.empty() ? "" : t.rows.front()[cs];
    const std::string rel = std::filesystem::relative(f.parent_path(), dir).generic_string();
    out.rows.push_back({rel.empty() ? "." : rel, name, sampler, std::to_string(t.rows.size()),
                        std::to_string(failures), format_real(ok ? n_s / static_cast<double>(ok) : 0.0),
                        format_real(errors.empty() ? kNaN : rmse_from_errors(errors))});
  }
  return out;
}

}  // namespace mlabc::bench
