#include "mlabc/parameter.hpp"

#include <algorithm>
#include <cmath>

namespace mlabc {

bool ParameterVector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool BoundingBox::contains(const ParameterVector& theta) const {
  if (theta.size() != lo.size()) return false;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (theta[j] < lo[j] || theta[j] > hi[j]) return false;
  }
  return true;
}

}  // namespace mlabc
