#include "mlabc/mlmc/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "mlabc/error.hpp"

namespace mlabc {

std::vector<double> LatticeAxis::coordinates() const {
  std::vector<double> out(nodes);
  for (std::size_t i = 0; i < nodes; ++i) out[i] = node(i);
  return out;
}

Lattice::Lattice(std::vector<LatticeAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidArgument("Lattice: at least one axis required");
  for (const auto& a : axes_) {
    if (a.nodes < 2 || !(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw InvalidArgument("Lattice: each axis needs >= 2 nodes and finite lo < hi");
    }
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t j = axes_.size() - 1; j > 0; --j) strides_[j - 1] = strides_[j] * axes_[j].nodes;
  size_ = strides_[0] * axes_[0].nodes;
}

std::vector<double> Lattice::spacings() const {
  std::vector<double> out;
  for (const auto& a : axes_) out.push_back(a.spacing());
  return out;
}

std::vector<std::size_t> Lattice::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    idx[j] = flat / strides_[j];
    flat %= strides_[j];
  }
  return idx;
}

std::vector<double> Lattice::node(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::vector<double> out(axes_.size());
  for (std::size_t j = 0; j < axes_.size(); ++j) out[j] = axes_[j].node(idx[j]);
  return out;
}

double MarginalCdf::evaluate(double x) const {
  if (x <= nodes.front()) return values.front();
  if (x >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const auto i = static_cast<std::size_t>(it - nodes.begin());
  const double w = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
  return values[i - 1] + w * (values[i] - values[i - 1]);
}

bool MarginalCdf::is_constant() const {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

}  // namespace mlabc
