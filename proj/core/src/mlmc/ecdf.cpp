#include "mlabc/mlmc/ecdf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mlabc/error.hpp"
#include "mlabc/mlmc/smoothing.hpp"

namespace mlabc {
namespace {

// Along one axis the smoothed indicator is a soft step in the node index:
// 0 well below the sample, 1 well above, and smooth on at most a few nodes
// in between. Steps stores its nonzero forward differences.
struct Steps {
  std::array<std::size_t, 5> index{};
  std::array<double, 5> delta{};
  std::size_t count = 0;

  void push(std::size_t i, double d) {
    if (d != 0.0) {
      index[count] = i;
      delta[count] = d;
      ++count;
    }
  }
};

Steps axis_steps(double theta, const LatticeAxis& axis) {
  Steps steps;
  const double h = axis.spacing();
  const auto n = static_cast<long long>(axis.nodes);
  const double pos = std::floor((theta - axis.lo) / h);
  const long long c = static_cast<long long>(std::clamp(pos, -3.0, static_cast<double>(n + 2)));
  const long long a = std::max(0LL, c - 1);
  const long long b = std::min(n - 1, c + 2);
  if (a > b) {
    if (b < 0) steps.push(0, 1.0);  // sample below the whole axis
    return steps;
  }
  double prev = 0.0;
  for (long long i = a; i <= b; ++i) {
    const double phi = smoothing_xi((theta - axis.node(static_cast<std::size_t>(i))) / h);
    steps.push(static_cast<std::size_t>(i), phi - prev);
    prev = phi;
  }
  if (b == c + 2 && b + 1 <= n - 1) steps.push(static_cast<std::size_t>(b + 1), 1.0 - prev);
  return steps;
}

bool outside(const ParameterVector& theta, const Lattice& lattice) {
  for (std::size_t j = 0; j < lattice.dimension(); ++j) {
    if (theta[j] < lattice.axis(j).lo || theta[j] > lattice.axis(j).hi) return true;
  }
  return false;
}

// Adds the outer product of per-axis steps into the difference grid.
void scatter(const std::vector<Steps>& steps, const Lattice& lattice, std::vector<double>& grid,
             double scale = 1.0) {
  const std::size_t k = steps.size();
  for (const auto& s : steps) {
    if (s.count == 0) return;
  }
  std::vector<std::size_t> pick(k, 0);
  for (;;) {
    std::size_t flat = 0;
    double w = scale;
    for (std::size_t j = 0; j < k; ++j) {
      flat += steps[j].index[pick[j]] * lattice.stride(j);
      w *= steps[j].delta[pick[j]];
    }
    grid[flat] += w;
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (++pick[j] < steps[j].count) break;
      pick[j] = 0;
      if (j == 0) return;
    }
  }
}

void prefix_sums(const Lattice& lattice, std::vector<double>& grid) {
  for (std::size_t j = 0; j < lattice.dimension(); ++j) {
    const std::size_t stride = lattice.stride(j);
    const std::size_t span = stride * lattice.axis(j).nodes;
    for (std::size_t f = 0; f < grid.size(); ++f) {
      if (f % span >= stride) grid[f] += grid[f - stride];
    }
  }
}

}  // namespace

double smoothed_indicator(std::span<const double> theta, std::span<const double> node,
                          std::span<const double> spacing) {
  double g = 1.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    g *= smoothing_xi((theta[j] - node[j]) / spacing[j]);
    if (g == 0.0) break;
  }
  return g;
}

LatticeCdf level_cdf(std::span<const ParameterVector> samples, const Lattice& lattice) {
  if (samples.empty()) throw InvalidArgument("level_cdf: no samples");
  LatticeCdf cdf{lattice, std::vector<double>(lattice.size(), 0.0), false, 0};
  std::vector<Steps> steps(lattice.dimension());
  for (const auto& theta : samples) {
    if (theta.size() != lattice.dimension()) throw InvalidArgument("level_cdf: dimension mismatch");
    if (outside(theta, lattice)) ++cdf.out_of_range;
    for (std::size_t j = 0; j < lattice.dimension(); ++j) steps[j] = axis_steps(theta[j], lattice.axis(j));
    scatter(steps, lattice, cdf.values);
  }
  prefix_sums(lattice, cdf.values);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double& v : cdf.values) v *= inv_n;
  return cdf;
}

LatticeCdf level_cdf(std::span<const ParameterVector> samples, std::span<const double> weights,
                     const Lattice& lattice) {
  if (samples.empty()) throw InvalidArgument("level_cdf: no samples");
  if (weights.size() != samples.size()) throw InvalidArgument("level_cdf: one weight per sample required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("level_cdf: weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("level_cdf: weights sum to zero");
  LatticeCdf cdf{lattice, std::vector<double>(lattice.size(), 0.0), false, 0};
  std::vector<Steps> steps(lattice.dimension());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& theta = samples[i];
    if (theta.size() != lattice.dimension()) throw InvalidArgument("level_cdf: dimension mismatch");
    if (outside(theta, lattice)) ++cdf.out_of_range;
    if (weights[i] == 0.0) continue;
    for (std::size_t j = 0; j < lattice.dimension(); ++j) steps[j] = axis_steps(theta[j], lattice.axis(j));
    scatter(steps, lattice, cdf.values, weights[i] / total);
  }
  prefix_sums(lattice, cdf.values);
  return cdf;
}

std::vector<double> indicator_grid(const ParameterVector& theta, const Lattice& lattice) {
  const std::size_t k = lattice.dimension();
  std::vector<std::vector<double>> phi(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto& axis = lattice.axis(j);
    const double h = axis.spacing();
    phi[j].resize(axis.nodes);
    for (std::size_t i = 0; i < axis.nodes; ++i) phi[j][i] = smoothing_xi((theta[j] - axis.node(i)) / h);
  }
  std::vector<double> grid(lattice.size());
  std::vector<std::size_t> idx(k, 0);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    double g = 1.0;
    for (std::size_t j = 0; j < k; ++j) g *= phi[j][idx[j]];
    grid[f] = g;
    for (std::size_t j = k; j-- > 0;) {
      if (++idx[j] < lattice.axis(j).nodes) break;
      idx[j] = 0;
    }
  }
  return grid;
}

LatticeCdf bias_correction(std::span<const ParameterVector> level,
                           std::span<const ParameterVector> matched, const Lattice& lattice) {
  if (level.size() != matched.size()) {
    throw InvalidArgument("bias_correction: level and matched sample counts differ");
  }
  LatticeCdf fine = level_cdf(level, lattice);
  const LatticeCdf coarse = level_cdf(matched, lattice);
  for (std::size_t f = 0; f < fine.values.size(); ++f) fine.values[f] -= coarse.values[f];
  return fine;
}

LatticeCdf monotonicity_adjust(LatticeCdf cdf) {
  for (double& v : cdf.values) v = std::clamp(v, 0.0, 1.0);
  const Lattice& lattice = cdf.lattice;
  for (std::size_t j = 0; j < lattice.dimension(); ++j) {
    const std::size_t stride = lattice.stride(j);
    const std::size_t span = stride * lattice.axis(j).nodes;
    for (std::size_t f = 0; f < cdf.values.size(); ++f) {
      if (f % span >= stride) cdf.values[f] = std::max(cdf.values[f], cdf.values[f - stride]);
    }
  }
  cdf.adjusted = true;
  return cdf;
}

MarginalCdf monotonicity_adjust(MarginalCdf marginal) {
  double running = 0.0;
  for (double& v : marginal.values) {
    v = std::max(std::clamp(v, 0.0, 1.0), running);
    running = v;
  }
  return marginal;
}

std::vector<MarginalCdf> marginal_cdfs(const LatticeCdf& cdf) {
  const Lattice& lattice = cdf.lattice;
  std::size_t top = 0;
  for (std::size_t j = 0; j < lattice.dimension(); ++j) top += (lattice.axis(j).nodes - 1) * lattice.stride(j);
  std::vector<MarginalCdf> out;
  for (std::size_t j = 0; j < lattice.dimension(); ++j) {
    const auto& axis = lattice.axis(j);
    MarginalCdf m{j, axis.coordinates(), std::vector<double>(axis.nodes)};
    const std::size_t base = top - (axis.nodes - 1) * lattice.stride(j);
    for (std::size_t i = 0; i < axis.nodes; ++i) m.values[i] = cdf.values[base + i * lattice.stride(j)];
    out.push_back(std::move(m));
  }
  return out;
}

double inverse_marginal(const MarginalCdf& marginal, double p) {
  const auto& f = marginal.values;
  const auto& x = marginal.nodes;
  if (p <= f.front()) return x.front();
  if (p > f.back()) return x.back();
  // F is nondecreasing, so the first node reaching p is found by bisection.
  const auto it = std::lower_bound(f.begin(), f.end(), p);
  const auto i = static_cast<std::size_t>(it - f.begin());
  const double w = (p - f[i - 1]) / (f[i] - f[i - 1]);
  return x[i - 1] + w * (x[i] - x[i - 1]);
}

MarginalCdf smoothed_axis_cdf(std::span<const ParameterVector> samples, std::size_t component,
                              const LatticeAxis& axis) {
  if (samples.empty()) throw InvalidArgument("smoothed_axis_cdf: no samples");
  MarginalCdf m{component, axis.coordinates(), std::vector<double>(axis.nodes, 0.0)};
  for (const auto& theta : samples) {
    const Steps s = axis_steps(theta[component], axis);
    for (std::size_t c = 0; c < s.count; ++c) m.values[s.index[c]] += s.delta[c];
  }
  double running = 0.0;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double& v : m.values) {
    running += v;
    v = running * inv_n;
  }
  return m;
}

}  // namespace mlabc
