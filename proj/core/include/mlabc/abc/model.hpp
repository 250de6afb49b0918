#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "mlabc/parameter.hpp"
#include "mlabc/random.hpp"

namespace mlabc {

/// An ABC problem: a stochastic simulator together with the observed data and
/// the discrepancy metric d(D, D_s). One call is one data generation step.
///
/// Implementations must be safe to call concurrently; all randomness comes
/// from the caller's stream.
class AbcModel {
 public:
  virtual ~AbcModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;

  /// Simulates D_s ~ f(. | theta) and returns d(D, D_s). A simulation may stop
  /// early once the discrepancy is known to exceed `cutoff`; it then returns
  /// +infinity. Returning +infinity also marks simulations that can never be
  /// accepted (e.g. extinction in the TB model).
  virtual double simulate_discrepancy(const ParameterVector& theta, Rng& rng,
                                      double cutoff) const = 0;
};

/// Adapts a callable into an AbcModel. Mostly used by tests.
class FunctionModel final : public AbcModel {
 public:
  using Fn = std::function<double(const ParameterVector&, Rng&)>;

  FunctionModel(std::size_t dimension, Fn fn, std::string name = "function")
      : dimension_(dimension), fn_(std::move(fn)), name_(std::move(name)) {}

  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return name_; }
  double simulate_discrepancy(const ParameterVector& theta, Rng& rng, double) const override {
    return fn_(theta, rng);
  }

 private:
  std::size_t dimension_;
  Fn fn_;
  std::string name_;
};

}  // namespace mlabc
