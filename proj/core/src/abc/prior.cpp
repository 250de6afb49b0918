#include "mlabc/abc/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "mlabc/error.hpp"

namespace mlabc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kProbeBatch = 1'000'000;

// Standard normal draw restricted to [a, b] by inverting the CDF. Works on
// the upper tail through the complementary CDF to keep precision.
double truncated_standard_normal(double a, double b, Rng& rng) {
  const boost::math::normal_distribution<double> z;
  if (a > 0.0) {
    // Mirror to the lower tail: X in [a, b] <=> -X in [-b, -a].
    return -truncated_standard_normal(-b, -a, rng);
  }
  const double pa = std::isfinite(a) ? boost::math::cdf(z, a) : 0.0;
  const double pb = std::isfinite(b) ? boost::math::cdf(z, b) : 1.0;
  if (!(pb > pa)) {
    throw DegenerateTruncation("normal prior component has no mass in the truncation box");
  }
  double p = pa + (pb - pa) * rng.uniform();
  p = std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
  return std::clamp(boost::math::quantile(z, p), a, b);
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

Prior::Prior(std::vector<PriorComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("Prior: at least one component required");
  for (std::size_t j = 0; j < components_.size(); ++j) {
    std::visit(overloaded{
                   [&](const UniformPrior& u) {
                     if (!(u.lo < u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi)) {
                       throw InvalidArgument("Prior: uniform component needs finite lo < hi");
                     }
                   },
                   [&](const NormalPrior& n) {
                     if (!(n.sd > 0.0) || !std::isfinite(n.mean)) {
                       throw InvalidArgument("Prior: normal component needs sd > 0");
                     }
                   },
                   [&](const DependentUniformPrior& d) {
                     if (d.reference >= j) {
                       throw InvalidArgument(
                           "Prior: dependent uniform must reference an earlier component");
                     }
                   },
               },
               components_[j].law);
  }
}

Prior Prior::sis_default() {
  return Prior({{"beta", UniformPrior{0.0, 0.06}}, {"gamma", UniformPrior{0.0, 2.0}}});
}

Prior Prior::tb_default() {
  return Prior({{"alpha", UniformPrior{0.0, 5.0}},
                {"delta", DependentUniformPrior{0}},
                {"mu", NormalPrior{0.198, 0.06735}}});
}

std::vector<std::string> Prior::names() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(c.name);
  return out;
}

ParameterVector Prior::sample(Rng& rng) const {
  ParameterVector theta(components_.size());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    theta[j] = std::visit(overloaded{
                              [&](const UniformPrior& u) { return rng.uniform(u.lo, u.hi); },
                              [&](const NormalPrior& n) { return n.mean + n.sd * rng.normal(); },
                              [&](const DependentUniformPrior& d) {
                                return rng.uniform(0.0, theta[d.reference]);
                              },
                          },
                          components_[j].law);
  }
  return theta;
}

ParameterVector Prior::sample_truncated(const BoundingBox& box, Rng& rng) const {
  const std::size_t k = components_.size();
  if (box.dimension() != k || box.hi.size() != k) {
    throw InvalidArgument("sample_truncated: box dimension mismatch");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (!(box.lo[j] <= box.hi[j])) throw InvalidArgument("sample_truncated: box has lo > hi");
    if (const auto* u = std::get_if<UniformPrior>(&components_[j].law)) {
      if (box.lo[j] > u->hi || box.hi[j] < u->lo) {
        throw DegenerateTruncation("truncation box misses the support of '" +
                                   components_[j].name + "'");
      }
    }
  }

  ParameterVector theta(k);
  for (std::uint64_t attempt = 0; attempt < kProbeBatch; ++attempt) {
    bool inside = true;
    for (std::size_t j = 0; j < k && inside; ++j) {
      const double lo = box.lo[j];
      const double hi = box.hi[j];
      std::visit(overloaded{
                     [&](const UniformPrior& u) {
                       const double a = std::max(u.lo, lo);
                       const double b = std::min(u.hi, hi);
                       theta[j] = a == b ? a : rng.uniform(a, b);
                     },
                     [&](const NormalPrior& n) {
                       theta[j] = lo == hi ? lo
                                           : n.mean + n.sd * truncated_standard_normal(
                                                                 (lo - n.mean) / n.sd,
                                                                 (hi - n.mean) / n.sd, rng);
                     },
                     [&](const DependentUniformPrior& d) {
                       const double ref = theta[d.reference];
                       if (lo == hi) {
                         // Point mass on this axis: weight the reference by the
                         // conditional density 1/ref of hitting it.
                         const double floor_ref = std::max(lo, box.lo[d.reference]);
                         inside = lo <= ref && ref > 0.0 &&
                                  (floor_ref <= 0.0 || rng.uniform() * ref < floor_ref);
                         theta[j] = lo;
                       } else {
                         theta[j] = rng.uniform(0.0, ref);
                         inside = theta[j] >= lo && theta[j] <= hi;
                       }
                     },
                 },
                 components_[j].law);
    }
    if (inside) return theta;
  }
  throw DegenerateTruncation("truncated prior: acceptance rate below 1e-6 over " +
                             std::to_string(kProbeBatch) + " attempts");
}

bool Prior::in_support(const ParameterVector& theta) const {
  return density(theta) > 0.0;
}

double Prior::density(const ParameterVector& theta) const {
  if (theta.size() != components_.size()) {
    throw InvalidArgument("Prior::density: dimension mismatch");
  }
  double p = 1.0;
  for (std::size_t j = 0; j < components_.size() && p > 0.0; ++j) {
    const double x = theta[j];
    p *= std::visit(overloaded{
                        [&](const UniformPrior& u) {
                          return x >= u.lo && x <= u.hi ? 1.0 / (u.hi - u.lo) : 0.0;
                        },
                        [&](const NormalPrior& n) { return normal_pdf(x, n.mean, n.sd); },
                        [&](const DependentUniformPrior& d) {
                          const double ref = theta[d.reference];
                          return ref > 0.0 && x >= 0.0 && x <= ref ? 1.0 / ref : 0.0;
                        },
                    },
                    components_[j].law);
  }
  return p;
}

double Prior::density_ratio(const ParameterVector& num, const ParameterVector& den) const {
  const bool num_in = in_support(num);
  const bool den_in = in_support(den);
  if (!den_in) {
    if (!num_in) throw InvalidArgument("density_ratio: both points outside the prior support");
    return std::numeric_limits<double>::infinity();
  }
  if (!num_in) return 0.0;
  double ratio = 1.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    ratio *= std::visit(overloaded{
                            [](const UniformPrior&) { return 1.0; },
                            [&](const NormalPrior& n) {
                              const double zn = (num[j] - n.mean) / n.sd;
                              const double zd = (den[j] - n.mean) / n.sd;
                              return std::exp(0.5 * (zd * zd - zn * zn));
                            },
                            [&](const DependentUniformPrior& d) {
                              return den[d.reference] / num[d.reference];
                            },
                        },
                        components_[j].law);
  }
  return ratio;
}

}  // namespace mlabc
