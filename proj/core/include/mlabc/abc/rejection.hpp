#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mlabc/abc/model.hpp"
#include "mlabc/abc/prior.hpp"
#include "mlabc/error.hpp"
#include "mlabc/parameter.hpp"

namespace mlabc {

/// Tally of data generation steps (model simulations).
class CostCounter {
 public:
  CostCounter() = default;
  explicit CostCounter(std::uint64_t steps) : steps_(steps) {}

  void add(std::uint64_t steps = 1) noexcept { steps_ += steps; }
  std::uint64_t steps() const noexcept { return steps_; }
  CostCounter& operator+=(const CostCounter& other) noexcept {
    steps_ += other.steps_;
    return *this;
  }
  friend bool operator==(const CostCounter&, const CostCounter&) = default;

 private:
  std::uint64_t steps_ = 0;
};

/// Accepted parameter vectors together with the discrepancy of the
/// simulation that accepted each of them.
struct SampleSet {
  std::vector<ParameterVector> samples;
  std::vector<double> discrepancies;
  double threshold = 0.0;
  CostCounter cost;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t dimension() const noexcept { return samples.empty() ? 0 : samples.front().size(); }
};

struct RejectionOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  std::uint64_t budget_cap = 1'000'000'000;
};

/// Raised when a sampler exceeds its simulation budget. Carries whatever was
/// accepted before the budget ran out.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, SampleSet partial)
      : Error(what), partial_(std::move(partial)) {}
  const SampleSet& partial() const noexcept { return partial_; }

 private:
  SampleSet partial_;
};

/// Componentwise min/max of the samples. Throws InvalidArgument when empty.
BoundingBox support_bounding_box(const SampleSet& samples);
BoundingBox support_bounding_box(const std::vector<ParameterVector>& samples);

/// ABC rejection sampling: n independent draws from p(theta | d(D, Ds) <= epsilon).
/// Proposals come from the prior, or from the prior truncated to `truncation`
/// when given. Slot i draws from the sub-stream derive_seed(seed, {i}), so the
/// result does not depend on the number of workers.
SampleSet abc_rejection(const Prior& prior, const std::optional<BoundingBox>& truncation,
                        const AbcModel& model, double epsilon, std::size_t n,
                        std::uint64_t seed, const RejectionOptions& options = {});

}  // namespace mlabc
