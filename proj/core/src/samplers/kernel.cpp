#include "mlabc/samplers/kernel.hpp"

#include <cmath>
#include <numbers>

namespace mlabc {

GaussianKernel::GaussianKernel(Eigen::MatrixXd covariance) : cov_(std::move(covariance)) {
  if (cov_.rows() == 0 || cov_.rows() != cov_.cols()) {
    throw DegenerateKernel("kernel covariance must be a non-empty square matrix");
  }
  if (!cov_.allFinite()) throw DegenerateKernel("kernel covariance has non-finite entries");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DegenerateKernel("kernel covariance is not symmetric");
  }
  llt_.compute(cov_);
  if (llt_.info() == Eigen::Success) {
    positive_definite_ = true;
    factor_ = llt_.matrixL();
    const double log_det = 2.0 * factor_.diagonal().array().log().sum();
    log_norm_ = -0.5 * (static_cast<double>(cov_.rows()) * std::log(2.0 * std::numbers::pi) + log_det);
    return;
  }
  // Semidefinite: factor through the eigendecomposition instead.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_);
  if (eig.info() != Eigen::Success) throw DegenerateKernel("kernel covariance decomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-12 * scale) {
    throw DegenerateKernel("kernel covariance has a negative eigenvalue");
  }
  factor_ = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

GaussianKernel GaussianKernel::tb_naive() {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s(0, 0) = 0.75 * 0.75;
  s(1, 1) = 0.75 * 0.75;
  s(2, 2) = 0.03 * 0.03;
  return GaussianKernel(s);
}

GaussianKernel GaussianKernel::tb_tuned() {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s(0, 0) = 0.5 * 0.5;
  s(1, 1) = 0.5 * 0.5;
  s(0, 1) = s(1, 0) = 0.225;
  s(2, 2) = 0.015 * 0.015;
  return GaussianKernel(s);
}

ParameterVector GaussianKernel::sample(const ParameterVector& center, Rng& rng) const {
  const auto k = cov_.rows();
  if (static_cast<Eigen::Index>(center.size()) != k) {
    throw InvalidArgument("GaussianKernel::sample: dimension mismatch");
  }
  Eigen::VectorXd z(k);
  for (Eigen::Index j = 0; j < k; ++j) z(j) = rng.normal();
  const Eigen::VectorXd step = factor_ * z;
  ParameterVector out = center;
  for (Eigen::Index j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] += step(j);
  return out;
}

double GaussianKernel::density(const ParameterVector& x, const ParameterVector& center) const {
  if (!positive_definite_) throw DegenerateKernel("kernel density needs a positive-definite covariance");
  const auto k = cov_.rows();
  Eigen::VectorXd diff(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    diff(j) = x[static_cast<std::size_t>(j)] - center[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd w = llt_.matrixL().solve(diff);
  return std::exp(log_norm_ - 0.5 * w.squaredNorm());
}

}  // namespace mlabc
