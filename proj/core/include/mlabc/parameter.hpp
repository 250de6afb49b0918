#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mlabc {

/// A point in the k-dimensional parameter space.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::size_t k, double fill = 0.0) : values_(k, fill) {}
  ParameterVector(std::initializer_list<double> values) : values_(values) {}
  explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

/// Axis-aligned box [lo_j, hi_j] in parameter space.
struct BoundingBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const noexcept { return lo.size(); }
  bool contains(const ParameterVector& theta) const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace mlabc
