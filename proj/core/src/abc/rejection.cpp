#include "mlabc/abc/rejection.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <string>

#include "mlabc/parallel.hpp"

namespace mlabc {

BoundingBox support_bounding_box(const std::vector<ParameterVector>& samples) {
  if (samples.empty()) throw InvalidArgument("support_bounding_box: no samples");
  BoundingBox box{std::vector<double>(samples.front().begin(), samples.front().end()),
                  std::vector<double>(samples.front().begin(), samples.front().end())};
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      box.lo[j] = std::min(box.lo[j], s[j]);
      box.hi[j] = std::max(box.hi[j], s[j]);
    }
  }
  return box;
}

BoundingBox support_bounding_box(const SampleSet& samples) {
  return support_bounding_box(samples.samples);
}

SampleSet abc_rejection(const Prior& prior, const std::optional<BoundingBox>& truncation,
                        const AbcModel& model, double epsilon, std::size_t n,
                        std::uint64_t seed, const RejectionOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidArgument("abc_rejection: epsilon must be > 0");
  if (n < 1) throw InvalidArgument("abc_rejection: n must be >= 1");
  if (prior.dimension() != model.dimension()) {
    throw InvalidArgument("abc_rejection: prior and model dimensions differ");
  }

  std::vector<ParameterVector> accepted(n);
  std::vector<double> distance(n, 0.0);
  std::vector<std::uint64_t> slot_cost(n, 0);
  std::vector<char> done(n, 0);
  std::atomic<std::uint64_t> spent{0};
  std::atomic<bool> exhausted{false};

  auto run_slot = [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    for (;;) {
      if (exhausted.load(std::memory_order_relaxed)) return;
      if (spent.fetch_add(1, std::memory_order_relaxed) >= options.budget_cap) {
        exhausted = true;
        return;
      }
      ParameterVector theta = truncation ? prior.sample_truncated(*truncation, rng) : prior.sample(rng);
      ++slot_cost[i];
      const double d = model.simulate_discrepancy(theta, rng, epsilon);
      if (d <= epsilon) {
        accepted[i] = std::move(theta);
        distance[i] = d;
        done[i] = 1;
        return;
      }
    }
  };
  parallel_for(n, options.workers, run_slot);

  SampleSet out;
  out.threshold = epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    out.cost.add(slot_cost[i]);
    if (done[i]) {
      assert(distance[i] <= epsilon);
      out.samples.push_back(std::move(accepted[i]));
      out.discrepancies.push_back(distance[i]);
    }
  }
  if (out.samples.size() < n) {
    const std::string msg = "abc_rejection: simulation budget of " +
                            std::to_string(options.budget_cap) + " exhausted after " +
                            std::to_string(out.samples.size()) + " of " + std::to_string(n) +
                            " samples at epsilon=" + std::to_string(epsilon);
    throw BudgetExhausted(msg, std::move(out));
  }
  return out;
}

}  // namespace mlabc
