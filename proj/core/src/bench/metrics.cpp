#include "mlabc/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "mlabc/error.hpp"

namespace mlabc::bench {

double sup_distance(const LatticeCdf& a, const LatticeCdf& b) {
  if (!(a.lattice == b.lattice) || a.values.size() != b.values.size()) {
    throw InvalidArgument("sup_distance: lattices differ");
  }
  double m = 0.0;
  for (std::size_t f = 0; f < a.values.size(); ++f) m = std::max(m, std::abs(a.values[f] - b.values[f]));
  return m;
}

double rmse_from_errors(std::span<const double> sup_errors) {
  if (sup_errors.empty()) throw InvalidArgument("rmse: no replications");
  double s = 0.0;
  for (double e : sup_errors) s += e * e;
  return std::sqrt(s / static_cast<double>(sup_errors.size()));
}

double rmse_linf(std::span<const LatticeCdf> estimates, const LatticeCdf& reference) {
  std::vector<double> errors;
  for (const auto& e : estimates) errors.push_back(sup_distance(e, reference));
  return rmse_from_errors(errors);
}

double coupling_bias(std::span<const LatticeCdf> coupled, std::span<const LatticeCdf> uncoupled) {
  if (coupled.size() != uncoupled.size() || coupled.empty()) {
    throw InvalidArgument("coupling_bias: need matching, nonempty replication lists");
  }
  double s = 0.0;
  for (std::size_t r = 0; r < coupled.size(); ++r) s += sup_distance(coupled[r], uncoupled[r]);
  return s / static_cast<double>(coupled.size());
}

SlopeFit fit_convergence_slope(std::span<const std::pair<double, double>> cost_rmse) {
  const std::size_t n = cost_rmse.size();
  if (n < 2) throw InvalidArgument("fit_convergence_slope: need at least two points");
  std::vector<double> x, y;
  for (auto [c, r] : cost_rmse) {
    if (!(c > 0.0) || !(r > 0.0)) throw InvalidArgument("fit_convergence_slope: costs and rmse must be > 0");
    x.push_back(std::log(c));
    y.push_back(std::log(r));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_convergence_slope: all costs are equal");
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    const boost::math::students_t dist(static_cast<double>(n - 2));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
    fit.ci_defined = true;
  } else {
    fit.ci_low = -std::numeric_limits<double>::infinity();
    fit.ci_high = std::numeric_limits<double>::infinity();
  }
  return fit;
}

}  // namespace mlabc::bench
