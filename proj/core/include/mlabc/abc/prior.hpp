#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "mlabc/parameter.hpp"
#include "mlabc/random.hpp"

namespace mlabc {

struct UniformPrior {
  double lo;
  double hi;
};

struct NormalPrior {
  double mean;
  double sd;
};

/// U(0, theta[reference]); the reference must be an earlier component.
struct DependentUniformPrior {
  std::size_t reference;
};

struct PriorComponent {
  std::string name;
  std::variant<UniformPrior, NormalPrior, DependentUniformPrior> law;
};

/// Product-form prior over the parameter vector, sampled component by
/// component in declaration order.
class Prior {
 public:
  explicit Prior(std::vector<PriorComponent> components);

  /// beta ~ U(0, 0.06), gamma ~ U(0, 2).
  static Prior sis_default();
  /// alpha ~ U(0, 5), delta ~ U(0, alpha), mu ~ N(0.198, 0.06735^2).
  static Prior tb_default();

  std::size_t dimension() const noexcept { return components_.size(); }
  const std::vector<PriorComponent>& components() const noexcept { return components_; }
  std::vector<std::string> names() const;

  ParameterVector sample(Rng& rng) const;

  /// Draws from the prior conditioned on the box. Uniform and normal
  /// components are drawn from their truncated laws directly; dependent
  /// components by accept-reject of the whole vector. Throws
  /// DegenerateTruncation if the box has no prior mass or fewer than one in
  /// 10^6 attempts lands inside it.
  ParameterVector sample_truncated(const BoundingBox& box, Rng& rng) const;

  bool in_support(const ParameterVector& theta) const;

  /// Prior density at theta (zero outside the support).
  double density(const ParameterVector& theta) const;

  /// density(num) / density(den), evaluated factor by factor. Returns 0 when
  /// num is outside the support and +inf when only den is. Throws
  /// InvalidArgument when both are outside.
  double density_ratio(const ParameterVector& num, const ParameterVector& den) const;

 private:
  std::vector<PriorComponent> components_;
};

}  // namespace mlabc
