#include "mlabc/models/sis_posterior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <variant>

#include "mlabc/error.hpp"
#include "mlabc/parallel.hpp"

namespace mlabc {

std::vector<double> sis_transition_column(const GeneratorMatrix& q, double dt, std::size_t y) {
  const std::size_t n = q.dimension();
  if (y >= n) throw InvalidArgument("sis_transition_column: state out of range");
  if (dt < 0.0) throw InvalidArgument("sis_transition_column: negative time step");
  const auto lower = q.lower();
  const auto diag = q.diagonal();
  const auto upper = q.upper();

  std::vector<double> p(n, 0.0);
  p[y] = 1.0;
  double rate = 0.0;
  for (double d : diag) rate = std::max(rate, -d);
  if (rate == 0.0 || dt == 0.0) return p;

  // exp(Q t) = sum_k Poisson(k; rate t) (I + Q / rate)^k. Substeps keep
  // rate * t small enough that exp(-rate t) does not underflow.
  const auto substeps = static_cast<std::size_t>(std::ceil(rate * dt / 500.0));
  const double lambda = rate * dt / static_cast<double>(substeps);
  std::vector<double> stay(n), from_below(n, 0.0), from_above(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    stay[x] = 1.0 + diag[x] / rate;
    if (x > 0) from_below[x] = lower[x - 1] / rate;
    if (x + 1 < n) from_above[x] = upper[x] / rate;
  }
  std::vector<double> term(n), next(n), out(n);
  for (std::size_t step = 0; step < substeps; ++step) {
    term = p;
    double weight = std::exp(-lambda);
    double mass = weight;
    for (std::size_t x = 0; x < n; ++x) out[x] = weight * term[x];
    // Poisson weights past the mode decay monotonically; stop once they are
    // below rounding of the accumulated mass.
    for (std::size_t k = 1; static_cast<double>(k) <= lambda || weight > 1e-18 * mass; ++k) {
      next[0] = stay[0] * term[0] + from_above[0] * term[1];
      for (std::size_t x = 1; x + 1 < n; ++x) {
        next[x] = stay[x] * term[x] + from_below[x] * term[x - 1] + from_above[x] * term[x + 1];
      }
      next[n - 1] = stay[n - 1] * term[n - 1] + from_below[n - 1] * term[n - 2];
      term.swap(next);
      weight *= lambda / static_cast<double>(k);
      mass += weight;
      for (std::size_t x = 0; x < n; ++x) out[x] += weight * term[x];
    }
    p = out;
  }
  for (double& v : p) v = std::clamp(v, 0.0, 1.0);
  return p;
}

SisLikelihood::SisLikelihood(TimeSeriesData data, int s0, int n_pop)
    : data_(std::move(data)), s0_(s0), n_pop_(n_pop) {
  data_.validate(n_pop_);
  if (s0_ < 0 || s0_ > n_pop_) throw InvalidArgument("SisLikelihood: s0 out of range");
}

double SisLikelihood::operator()(const SisParameters& params) const {
  const GeneratorMatrix q = sis_generator_matrix(params, n_pop_);
  double likelihood = 1.0;
  double previous_time = 0.0;
  int previous = s0_;
  for (std::size_t k = 0; k < data_.times.size(); ++k) {
    const auto column = sis_transition_column(q, data_.times[k] - previous_time,
                                              static_cast<std::size_t>(previous));
    likelihood *= column[static_cast<std::size_t>(data_.values[k])];
    if (likelihood == 0.0) return 0.0;
    previous_time = data_.times[k];
    previous = data_.values[k];
  }
  return likelihood;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> evaluate_grid(const LikelihoodFn& likelihood, const std::vector<double>& x,
                                  const std::vector<double>& y, unsigned workers) {
  std::vector<double> values(x.size() * y.size());
  parallel_for(x.size(), workers, [&](std::size_t a) {
    for (std::size_t b = 0; b < y.size(); ++b) {
      const double v = likelihood(ParameterVector{x[a], y[b]});
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw NumericalError("posterior quadrature: likelihood is negative or not finite");
      }
      values[a * y.size() + b] = v;
    }
  });
  return values;
}

}  // namespace

LatticeCdf posterior_cdf_uniform_prior(const LikelihoodFn& likelihood, const BoundingBox& box,
                                       const Lattice& lattice, const QuadratureOptions& options) {
  if (lattice.dimension() != 2 || box.dimension() != 2) {
    throw InvalidArgument("posterior_cdf_uniform_prior: only two parameters are supported");
  }
  if (options.scan_points < 3 || options.fine_points < 3) {
    throw InvalidArgument("posterior_cdf_uniform_prior: too few quadrature points");
  }
  std::array<double, 2> lo{box.lo[0], box.lo[1]}, hi{box.hi[0], box.hi[1]};

  // Zoom in on the region where the likelihood is not negligible. The last
  // scan also marks the scan cells that can be skipped on the fine grid.
  std::vector<double> scan_x, scan_y;
  std::vector<char> live;
  for (int pass = 0; pass < 6; ++pass) {
    const auto xs = linspace(lo[0], hi[0], options.scan_points);
    const auto ys = linspace(lo[1], hi[1], options.scan_points);
    const auto values = evaluate_grid(likelihood, xs, ys, options.workers);
    const double peak = *std::max_element(values.begin(), values.end());
    if (peak == 0.0) {
      if (pass == 0) throw DegeneratePosterior("posterior quadrature: likelihood is zero on the prior box");
      break;
    }
    scan_x = xs;
    scan_y = ys;
    live.assign(values.size(), 0);
    const auto nx = static_cast<std::ptrdiff_t>(xs.size()), ny = static_cast<std::ptrdiff_t>(ys.size());
    for (std::ptrdiff_t a = 0; a < nx; ++a) {
      for (std::ptrdiff_t b = 0; b < ny; ++b) {
        if (!(values[static_cast<std::size_t>(a * ny + b)] > options.tolerance * peak)) continue;
        for (std::ptrdiff_t da = -2; da <= 1; ++da) {
          for (std::ptrdiff_t db = -2; db <= 1; ++db) {
            const auto ca = a + da, cb = b + db;
            if (ca >= 0 && cb >= 0 && ca < nx && cb < ny) live[static_cast<std::size_t>(ca * ny + cb)] = 1;
          }
        }
      }
    }
    std::array<std::size_t, 2> first{xs.size(), ys.size()}, last{0, 0};
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (std::size_t b = 0; b < ys.size(); ++b) {
        if (values[a * ys.size() + b] > options.tolerance * peak) {
          first[0] = std::min(first[0], a);
          last[0] = std::max(last[0], a);
          first[1] = std::min(first[1], b);
          last[1] = std::max(last[1], b);
        }
      }
    }
    bool shrunk = false;
    const std::array<const std::vector<double>*, 2> axes{&xs, &ys};
    for (int j = 0; j < 2; ++j) {
      const auto& g = *axes[j];
      const double new_lo = g[first[j] == 0 ? 0 : first[j] - 1];
      const double new_hi = g[std::min(g.size() - 1, last[j] + 1)];
      if (new_hi - new_lo < 0.5 * (hi[j] - lo[j])) shrunk = true;
      lo[j] = new_lo;
      hi[j] = new_hi;
    }
    if (!shrunk) break;
  }

  // Fine axes: uniform points plus every lattice node inside the region.
  std::array<std::vector<double>, 2> fine;
  for (int j = 0; j < 2; ++j) {
    fine[j] = linspace(lo[j], hi[j], options.fine_points);
    for (double s : lattice.axis(j).coordinates()) {
      if (s > lo[j] && s < hi[j]) fine[j].push_back(s);
    }
    std::sort(fine[j].begin(), fine[j].end());
    const double eps = 1e-12 * (hi[j] - lo[j]);
    fine[j].erase(std::unique(fine[j].begin(), fine[j].end(),
                              [&](double a, double b) { return b - a <= eps; }),
                  fine[j].end());
  }
  const auto& xs = fine[0];
  const auto& ys = fine[1];
  const std::size_t ny = ys.size();
  // Scan cell (a, b) spans [scan_x[a], scan_x[a+1]] x [scan_y[b], scan_y[b+1]].
  auto cell = [](const std::vector<double>& g, double v) {
    const auto it = std::upper_bound(g.begin(), g.end(), v);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - g.begin() - 1));
    return std::min(i, g.size() - 2);
  };
  std::vector<double> c(xs.size() * ny, 0.0);
  parallel_for(xs.size(), options.workers, [&](std::size_t a) {
    for (std::size_t b = 0; b < ny; ++b) {
      bool needed = scan_x.empty();
      if (!needed) {
        // A fine point on a scan-cell boundary belongs to both cells.
        const std::size_t ca = cell(scan_x, xs[a]), cb = cell(scan_y, ys[b]);
        needed = live[ca * scan_y.size() + cb] != 0;
      }
      if (!needed) continue;
      const double v = likelihood(ParameterVector{xs[a], ys[b]});
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw NumericalError("posterior quadrature: likelihood is negative or not finite");
      }
      c[a * ny + b] = v;
    }
  });

  // Cumulative trapezoid along y, then along x.
  for (std::size_t a = 0; a < xs.size(); ++a) {
    double run = 0.0, prev = c[a * ny];
    c[a * ny] = 0.0;
    for (std::size_t b = 1; b < ny; ++b) {
      const double cur = c[a * ny + b];
      run += 0.5 * (prev + cur) * (ys[b] - ys[b - 1]);
      prev = cur;
      c[a * ny + b] = run;
    }
  }
  std::vector<double> prev_row(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(ny));
  for (std::size_t b = 0; b < ny; ++b) c[b] = 0.0;
  for (std::size_t a = 1; a < xs.size(); ++a) {
    const double w = 0.5 * (xs[a] - xs[a - 1]);
    for (std::size_t b = 0; b < ny; ++b) {
      const double cur = c[a * ny + b];
      c[a * ny + b] = c[(a - 1) * ny + b] + w * (prev_row[b] + cur);
      prev_row[b] = cur;
    }
  }
  const double total = c.back();
  if (!(total > 0.0)) throw DegeneratePosterior("posterior quadrature: zero posterior mass");

  auto locate = [](const std::vector<double>& g, double s) -> std::ptrdiff_t {
    if (s < g.front()) return -1;
    if (s >= g.back()) return static_cast<std::ptrdiff_t>(g.size() - 1);
    auto it = std::lower_bound(g.begin(), g.end(), s);
    if (*it != s && std::abs(*it - s) > 1e-12 * (g.back() - g.front())) --it;
    return it - g.begin();
  };
  LatticeCdf out{lattice, std::vector<double>(lattice.size(), 0.0), true, 0};
  const auto& ax0 = lattice.axis(0);
  const auto& ax1 = lattice.axis(1);
  for (std::size_t i = 0; i < ax0.nodes; ++i) {
    const auto a = locate(xs, ax0.node(i));
    if (a < 0) continue;
    for (std::size_t k = 0; k < ax1.nodes; ++k) {
      const auto b = locate(ys, ax1.node(k));
      if (b < 0) continue;
      out.values[i * lattice.stride(0) + k] =
          std::clamp(c[static_cast<std::size_t>(a) * ny + static_cast<std::size_t>(b)] / total, 0.0, 1.0);
    }
  }
  return out;
}

LatticeCdf sis_exact_posterior_cdf(const TimeSeriesData& data, int s0, int n_pop,
                                   const Prior& prior, const Lattice& lattice,
                                   const QuadratureOptions& options) {
  if (prior.dimension() != 2) throw InvalidArgument("sis_exact_posterior_cdf: prior must be 2-D");
  BoundingBox box{{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t j = 0; j < 2; ++j) {
    const auto* u = std::get_if<UniformPrior>(&prior.components()[j].law);
    if (!u) throw InvalidArgument("sis_exact_posterior_cdf: prior components must be uniform");
    box.lo[j] = u->lo;
    box.hi[j] = u->hi;
  }
  const SisLikelihood like(data, s0, n_pop);
  return posterior_cdf_uniform_prior([&](const ParameterVector& t) { return like(t); }, box, lattice,
                                     options);
}

}  // namespace mlabc
