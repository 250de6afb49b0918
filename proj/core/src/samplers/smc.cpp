#include "mlabc/samplers/smc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "mlabc/parallel.hpp"

namespace mlabc {

double ParticleEnsemble::effective_sample_size() const {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

CostCounter SmcRun::total_cost() const {
  CostCounter total;
  for (const auto& s : stages) total += s.cost;
  return total;
}

std::size_t sample_index(std::span<const double> cumulative, Rng& rng) {
  const double target = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

namespace {

void normalize(ParticleEnsemble& ensemble) {
  double total = 0.0;
  for (double w : ensemble.weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegeneracyError("smc_abc: all importance weights vanished at stage " +
                          std::to_string(ensemble.stage));
  }
  for (double& w : ensemble.weights) w /= total;
  if (ensemble.weights.size() >= 2 && ensemble.effective_sample_size() < 1.0 + 1e-9) {
    throw DegeneracyError("smc_abc: effective sample size collapsed to 1 at stage " +
                          std::to_string(ensemble.stage));
  }
}

}  // namespace

SmcRun smc_abc(std::size_t n_particles, std::span<const double> schedule,
               const GaussianKernel& kernel, const Prior& prior, const AbcModel& model,
               std::uint64_t seed, const SmcOptions& options) {
  if (n_particles < 1) throw InvalidArgument("smc_abc: N_P must be >= 1");
  if (schedule.empty()) throw InvalidArgument("smc_abc: empty threshold schedule");
  for (std::size_t t = 1; t < schedule.size(); ++t) {
    if (!(schedule[t] < schedule[t - 1])) {
      throw InvalidArgument("smc_abc: schedule must be strictly decreasing");
    }
  }
  if (kernel.dimension() != prior.dimension()) throw InvalidArgument("smc_abc: kernel dimension mismatch");

  SmcRun run;
  {
    RejectionOptions ropts{options.workers, options.budget_cap};
    SampleSet first = abc_rejection(prior, std::nullopt, model, schedule[0], n_particles,
                                    derive_seed(seed, {1}), ropts);
    ParticleEnsemble e;
    e.particles = std::move(first.samples);
    e.discrepancies = std::move(first.discrepancies);
    e.weights.assign(n_particles, 1.0 / static_cast<double>(n_particles));
    e.stage = 1;
    e.epsilon = schedule[0];
    e.cost = first.cost;
    run.stages.push_back(std::move(e));
  }
  std::uint64_t spent_before = run.stages.back().cost.steps();

  for (std::size_t t = 1; t < schedule.size(); ++t) {
    const ParticleEnsemble& prev = run.stages.back();
    const double eps = schedule[t];
    std::vector<double> cumulative(n_particles);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_particles; ++j) cumulative[j] = acc += prev.weights[j];

    ParticleEnsemble next;
    next.stage = t + 1;
    next.epsilon = eps;
    next.particles.resize(n_particles);
    next.discrepancies.resize(n_particles);
    next.weights.resize(n_particles);
    std::vector<std::uint64_t> slot_cost(n_particles, 0);
    std::atomic<std::uint64_t> spent{spent_before};
    std::atomic<bool> exhausted{false};

    parallel_for(n_particles, options.workers, [&](std::size_t i) {
      Rng rng(derive_seed(seed, {t + 1, i}));
      std::uint64_t outside = 0;
      for (;;) {
        if (exhausted.load(std::memory_order_relaxed)) return;
        const std::size_t j = sample_index(cumulative, rng);
        ParameterVector proposal = kernel.sample(prev.particles[j], rng);
        if (!prior.in_support(proposal)) {
          if (++outside > 10'000'000) {
            throw DegeneracyError("smc_abc: kernel keeps proposing outside the prior support");
          }
          continue;
        }
        if (spent.fetch_add(1, std::memory_order_relaxed) >= options.budget_cap) {
          exhausted = true;
          return;
        }
        ++slot_cost[i];
        const double d = model.simulate_discrepancy(proposal, rng, eps);
        if (d <= eps) {
          double mixture = 0.0;
          for (std::size_t m = 0; m < n_particles; ++m) {
            mixture += prev.weights[m] * kernel.density(proposal, prev.particles[m]);
          }
          next.weights[i] = mixture > 0.0 ? prior.density(proposal) / mixture : 0.0;
          next.particles[i] = std::move(proposal);
          next.discrepancies[i] = d;
          return;
        }
      }
    });
    for (auto c : slot_cost) next.cost.add(c);
    if (exhausted) {
      SampleSet partial;
      partial.samples = prev.particles;
      partial.threshold = prev.epsilon;
      partial.cost = run.total_cost();
      partial.cost += next.cost;
      throw BudgetExhausted("smc_abc: simulation budget exhausted at stage " + std::to_string(t + 1),
                            std::move(partial));
    }
    spent_before += next.cost.steps();
    normalize(next);
    run.stages.push_back(std::move(next));
  }
  return run;
}

std::vector<std::string> smc_invariant_violations(const SmcRun& run, std::span<const double> schedule,
                                                  std::size_t n_particles, const Prior& prior) {
  std::vector<std::string> out;
  if (run.stages.size() != schedule.size()) {
    out.push_back("expected " + std::to_string(schedule.size()) + " stages, got " +
                  std::to_string(run.stages.size()));
  }
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < run.stages.size(); ++t) {
    const auto& st = run.stages[t];
    const std::string at = "stage " + std::to_string(t + 1) + ": ";
    total += st.cost.steps();
    if (st.stage != t + 1) out.push_back(at + "wrong stage index");
    if (t < schedule.size() && st.epsilon != schedule[t]) out.push_back(at + "threshold differs from schedule");
    if (t > 0 && !(st.epsilon < run.stages[t - 1].epsilon)) out.push_back(at + "threshold not decreasing");
    if (st.particles.size() != n_particles || st.weights.size() != n_particles ||
        st.discrepancies.size() != n_particles) {
      out.push_back(at + "wrong ensemble size");
      continue;
    }
    double sum = 0.0;
    for (double w : st.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) out.push_back(at + "invalid weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) out.push_back(at + "weights sum to " + std::to_string(sum));
    for (double d : st.discrepancies) {
      if (!(d <= st.epsilon)) {
        out.push_back(at + "particle with discrepancy above threshold");
        break;
      }
    }
    for (const auto& p : st.particles) {
      if (!prior.in_support(p)) {
        out.push_back(at + "particle outside prior support");
        break;
      }
    }
    if (st.cost.steps() < n_particles) out.push_back(at + "fewer simulations than particles");
  }
  if (run.total_cost().steps() != total) out.push_back("stage costs do not add up to the total");
  return out;
}

}  // namespace mlabc
