#pragma once

#include <Eigen/Dense>

namespace kdfg {

/// Gaussian noise model: diagonal sigmas or a full covariance.
/// Whitening maps a residual r to L^{-1} r where L L^T = Sigma.
class NoiseModel {
 public:
  static NoiseModel Sigmas(const Eigen::VectorXd& sigmas);
  static NoiseModel Isotropic(int dim, double sigma) { return Sigmas(Eigen::VectorXd::Constant(dim, sigma)); }
  static NoiseModel Unit(int dim) { return Isotropic(dim, 1.0); }
  static NoiseModel Covariance(const Eigen::MatrixXd& covariance);

  int dim() const { return dim_; }
  bool isDiagonal() const { return diagonal_; }

  Eigen::VectorXd whiten(const Eigen::VectorXd& r) const;
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& H) const;

  /// 0.5 * |whiten(r)|^2
  double error(const Eigen::VectorXd& r) const { return 0.5 * whiten(r).squaredNorm(); }

  const Eigen::VectorXd& sigmas() const { return sigmas_; }

 private:
  NoiseModel() = default;
  int dim_ = 0;
  bool diagonal_ = true;
  Eigen::VectorXd sigmas_;
  Eigen::VectorXd inv_sigmas_;
  Eigen::MatrixXd chol_lower_;  // full covariance only
};

}  // namespace kdfg
