#pragma once

#include <cstddef>
#include <vector>

#include "mlabc/parameter.hpp"

namespace mlabc {

/// Regularly spaced nodes lo, lo + spacing, ..., hi on one parameter axis.
struct LatticeAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t nodes = 2;

  double spacing() const noexcept { return (hi - lo) / static_cast<double>(nodes - 1); }
  double node(std::size_t i) const noexcept {
    return i + 1 == nodes ? hi : lo + static_cast<double>(i) * spacing();
  }
  std::vector<double> coordinates() const;
  friend bool operator==(const LatticeAxis&, const LatticeAxis&) = default;
};

/// k-dimensional regular lattice. Values over it are stored row-major with
/// the last axis varying fastest.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::vector<LatticeAxis> axes);

  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const LatticeAxis& axis(std::size_t j) const { return axes_[j]; }
  const std::vector<LatticeAxis>& axes() const noexcept { return axes_; }
  std::size_t stride(std::size_t j) const { return strides_[j]; }
  std::vector<double> spacings() const;

  /// Per-axis node indices of a flat index.
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::vector<double> node(std::size_t flat) const;

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<LatticeAxis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// CDF values at every lattice node. Raw estimates can overshoot [0, 1]
/// because of the smoothing polynomial; `adjusted` records whether
/// monotonicity_adjust has been applied.
struct LatticeCdf {
  Lattice lattice;
  std::vector<double> values;
  bool adjusted = false;
  std::size_t out_of_range = 0;  // samples that fell outside the lattice box

  double at(std::size_t flat) const { return values[flat]; }
};

/// CDF of one coordinate on its axis nodes; linear between nodes and
/// constant beyond the end nodes.
struct MarginalCdf {
  std::size_t axis = 0;
  std::vector<double> nodes;
  std::vector<double> values;

  double evaluate(double x) const;
  bool is_constant() const;
};

}  // namespace mlabc
