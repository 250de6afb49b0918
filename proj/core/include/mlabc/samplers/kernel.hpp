#pragma once

#include <Eigen/Dense>

#include "mlabc/error.hpp"
#include "mlabc/parameter.hpp"
#include "mlabc/random.hpp"

namespace mlabc {

class DegenerateKernel : public Error {
 public:
  using Error::Error;
};

/// Gaussian random-walk proposal q(. | center) = N(center, covariance).
class GaussianKernel {
 public:
  /// Requires a symmetric (to 1e-12) positive-semidefinite covariance.
  explicit GaussianKernel(Eigen::MatrixXd covariance);

  /// diag(0.75^2, 0.75^2, 0.03^2): no correlations assumed.
  static GaussianKernel tb_naive();
  /// [[0.5^2, 0.225, 0], [0.225, 0.5^2, 0], [0, 0, 0.015^2]].
  static GaussianKernel tb_tuned();

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(cov_.rows()); }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  bool positive_definite() const noexcept { return positive_definite_; }

  ParameterVector sample(const ParameterVector& center, Rng& rng) const;

  /// Density of x under N(center, covariance). Throws DegenerateKernel when
  /// the covariance is singular.
  double density(const ParameterVector& x, const ParameterVector& center) const;

 private:
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;  // factor_ * factor_^T == cov_
  bool positive_definite_ = false;
  double log_norm_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace mlabc
