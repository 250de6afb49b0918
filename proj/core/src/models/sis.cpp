#include "mlabc/models/sis.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "mlabc/error.hpp"
#include "text_io.hpp"

namespace mlabc {
namespace {

void check_rates(double beta, double gamma) {
  if (!(beta >= 0.0) || !(gamma >= 0.0)) {
    throw InvalidModel("SIS rates must be nonnegative (beta=" + std::to_string(beta) +
                       ", gamma=" + std::to_string(gamma) + ")");
  }
}

// Direct-method SSA for the two SIS reactions. observe(index, S) is called once
// per observation time in order; returning false stops the simulation.
template <class Observe>
void run_sis(double beta, double gamma, int s, int i, std::span<const double> times, Rng& rng,
             Observe&& observe) {
  const std::size_t n = times.size();
  std::size_t next = 0;
  double t = 0.0;
  while (next < n) {
    const double infection = beta * s * i;
    const double total = infection + gamma * i;
    if (total <= 0.0) {
      for (; next < n; ++next) {
        if (!observe(next, s)) return;
      }
      return;
    }
    t += rng.exponential(total);
    while (next < n && times[next] < t) {
      if (!observe(next, s)) return;
      ++next;
    }
    if (next == n) return;
    if (rng.uniform() * total < infection) {
      --s;
      ++i;
    } else {
      ++s;
      --i;
    }
  }
}

void check_times(std::span<const double> times) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw InvalidArgument("observation times must be strictly increasing");
    }
  }
  if (!times.empty() && times.front() < 0.0) {
    throw InvalidArgument("observation times must be nonnegative");
  }
}

}  // namespace

void TimeSeriesData::validate(int n_pop) const {
  if (times.size() != values.size()) {
    throw InvalidArgument("time series: times and values differ in length");
  }
  check_times(times);
  for (int v : values) {
    if (v < 0 || v > n_pop) {
      throw InvalidArgument("time series: value " + std::to_string(v) + " outside [0, " +
                            std::to_string(n_pop) + "]");
    }
  }
}

std::vector<double> sis_default_observation_times() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(4.0 * k);
  return t;
}

ReactionNetwork sis_network() {
  ReactionNetwork net;
  net.species = {"S", "I"};
  net.reactions.push_back({"infection", {-1, 1},
                           [](std::span<const std::int64_t> x, std::span<const double> th) {
                             return th[0] * static_cast<double>(x[0]) * static_cast<double>(x[1]);
                           }});
  net.reactions.push_back({"recovery", {1, -1},
                           [](std::span<const std::int64_t> x, std::span<const double> th) {
                             return th[1] * static_cast<double>(x[1]);
                           }});
  return net;
}

TimeSeriesData sis_simulate(const SisParameters& params, int s0, int i0,
                            std::span<const double> obs_times, Rng& rng) {
  check_rates(params.beta, params.gamma);
  check_times(obs_times);
  if (s0 < 0 || i0 < 0) throw InvalidArgument("sis_simulate: negative initial counts");
  TimeSeriesData out;
  out.times.assign(obs_times.begin(), obs_times.end());
  out.values.resize(obs_times.size());
  run_sis(params.beta, params.gamma, s0, i0, obs_times, rng, [&](std::size_t k, int s) {
    out.values[k] = s;
    return true;
  });
  return out;
}

GeneratorMatrix::GeneratorMatrix(std::vector<double> lower, std::vector<double> diagonal,
                                 std::vector<double> upper)
    : lower_(std::move(lower)), diagonal_(std::move(diagonal)), upper_(std::move(upper)) {
  if (diagonal_.empty() || lower_.size() + 1 != diagonal_.size() ||
      upper_.size() + 1 != diagonal_.size()) {
    throw InvalidArgument("GeneratorMatrix: inconsistent diagonal lengths");
  }
}

double GeneratorMatrix::operator()(std::size_t row, std::size_t col) const {
  if (row == col) return diagonal_[col];
  if (row == col + 1) return lower_[col];
  if (row + 1 == col) return upper_[row];
  return 0.0;
}

Eigen::MatrixXd GeneratorMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index y = 0; y < n; ++y) {
    m(y, y) = diagonal_[y];
    if (y + 1 < n) {
      m(y + 1, y) = lower_[y];
      m(y, y + 1) = upper_[y];
    }
  }
  return m;
}

GeneratorMatrix sis_generator_matrix(const SisParameters& params, int n_pop) {
  if (n_pop < 1) throw InvalidArgument("sis_generator_matrix: n_pop must be >= 1");
  check_rates(params.beta, params.gamma);
  const auto n = static_cast<std::size_t>(n_pop) + 1;
  std::vector<double> lower(n - 1), diagonal(n), upper(n - 1);
  for (std::size_t y = 0; y < n; ++y) {
    const double s = static_cast<double>(y);
    const double infected = static_cast<double>(n_pop) - s;
    const double infection = params.beta * s * infected;  // S = y -> y - 1
    const double recovery = params.gamma * infected;       // S = y -> y + 1
    if (y > 0) upper[y - 1] = infection;
    if (y + 1 < n) lower[y] = recovery;
    diagonal[y] = -(infection + recovery);
  }
  return GeneratorMatrix(std::move(lower), std::move(diagonal), std::move(upper));
}

Eigen::MatrixXd sis_transition_matrix(const GeneratorMatrix& q, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("sis_transition_matrix: dt must be >= 0");
  const auto n = static_cast<Eigen::Index>(q.dimension());
  if (dt == 0.0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd scaled = q.dense() * dt;
  Eigen::MatrixXd p = scaled.exp();
  double worst = 0.0;
  Eigen::Index worst_col = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    double sum = p.col(c).sum();
    if (!std::isfinite(sum)) {
      worst = std::numeric_limits<double>::infinity();
      worst_col = c;
      break;
    }
    if (std::abs(sum - 1.0) > worst) {
      worst = std::abs(sum - 1.0);
      worst_col = c;
    }
  }
  if (worst > 1e-9) {
    std::ostringstream msg;
    msg << "matrix exponential lost accuracy: column " << worst_col << " sums to 1 "
        << (worst == std::numeric_limits<double>::infinity() ? "+ non-finite" : "+/- ")
        << worst << " (dt=" << dt << ", |Q|_1=" << scaled.cwiseAbs().colwise().sum().maxCoeff()
        << ")";
    throw NumericalError(msg.str());
  }
  return p.cwiseMax(0.0).cwiseMin(1.0);
}

double sis_exact_likelihood(const SisParameters& params, const TimeSeriesData& data, int s0,
                            int n_pop) {
  data.validate(n_pop);
  if (s0 < 0 || s0 > n_pop) throw InvalidArgument("sis_exact_likelihood: s0 out of range");
  const GeneratorMatrix q = sis_generator_matrix(params, n_pop);
  std::map<double, Eigen::MatrixXd> by_gap;
  double likelihood = 1.0;
  double previous_time = 0.0;
  int previous = s0;
  for (std::size_t k = 0; k < data.times.size(); ++k) {
    const double gap = data.times[k] - previous_time;
    auto it = by_gap.find(gap);
    if (it == by_gap.end()) it = by_gap.emplace(gap, sis_transition_matrix(q, gap)).first;
    likelihood *= it->second(data.values[k], previous);
    if (likelihood == 0.0) return 0.0;
    previous_time = data.times[k];
    previous = data.values[k];
  }
  return likelihood;
}

double sis_discrepancy(const TimeSeriesData& observed, const TimeSeriesData& simulated) {
  if (observed.values.size() != simulated.values.size() ||
      observed.times.size() != simulated.times.size()) {
    throw InvalidArgument("sis_discrepancy: series lengths differ");
  }
  if (observed.times != simulated.times) {
    throw InvalidArgument("sis_discrepancy: observation times differ");
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < observed.values.size(); ++k) {
    const double d = observed.values[k] - simulated.values[k];
    sse += d * d;
  }
  return std::sqrt(sse);
}

TimeSeriesData load_time_series_csv(const std::filesystem::path& path) {
  TimeSeriesData data;
  for (const auto& row : detail::read_numeric_rows(path, 2)) {
    data.times.push_back(row[0]);
    const double v = row[1];
    if (v != std::floor(v)) throw ConfigError(path.string() + ": count is not an integer");
    data.values.push_back(static_cast<int>(v));
  }
  return data;
}

void save_time_series_csv(const TimeSeriesData& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "time,count\n";
  out.precision(17);
  for (std::size_t k = 0; k < data.times.size(); ++k) {
    out << data.times[k] << ',' << data.values[k] << '\n';
  }
}

SisAbcModel::SisAbcModel(TimeSeriesData observed, int s0, int i0)
    : observed_(std::move(observed)), s0_(s0), i0_(i0) {
  if (s0 < 0 || i0 < 0) throw InvalidArgument("SisAbcModel: negative initial counts");
  observed_.validate(s0 + i0);
}

double SisAbcModel::simulate_discrepancy(const ParameterVector& theta, Rng& rng,
                                         double cutoff) const {
  check_rates(theta[0], theta[1]);
  const double limit = cutoff * cutoff;
  double sse = 0.0;
  bool exceeded = false;
  run_sis(theta[0], theta[1], s0_, i0_, observed_.times, rng, [&](std::size_t k, int s) {
    const double d = observed_.values[k] - s;
    sse += d * d;
    if (sse > limit) {
      exceeded = true;
      return false;
    }
    return true;
  });
  return exceeded ? std::numeric_limits<double>::infinity() : std::sqrt(sse);
}

}  // namespace mlabc
