#include "kdfg/noise_model.hpp"

#include "kdfg/errors.hpp"

namespace kdfg {

NoiseModel NoiseModel::Sigmas(const Eigen::VectorXd& sigmas) {
  if (sigmas.size() == 0) throw Error("noise model needs at least one sigma");
  if ((sigmas.array() <= 0.0).any() || !sigmas.allFinite()) throw Error("noise sigmas must be positive and finite");
  NoiseModel m;
  m.dim_ = static_cast<int>(sigmas.size());
  m.diagonal_ = true;
  m.sigmas_ = sigmas;
  m.inv_sigmas_ = sigmas.cwiseInverse();
  return m;
}

NoiseModel NoiseModel::Covariance(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw Error("covariance must be square and non-empty");
  }
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + covariance.cwiseAbs().maxCoeff())) {
    throw Error("covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw Error("covariance must be positive definite");
  NoiseModel m;
  m.dim_ = static_cast<int>(covariance.rows());
  m.diagonal_ = false;
  m.chol_lower_ = llt.matrixL();
  m.sigmas_ = covariance.diagonal().cwiseSqrt();
  return m;
}

Eigen::VectorXd NoiseModel::whiten(const Eigen::VectorXd& r) const {
  if (r.size() != dim_) throw DimensionError("residual dimension does not match noise model");
  if (diagonal_) return r.cwiseProduct(inv_sigmas_);
  return chol_lower_.triangularView<Eigen::Lower>().solve(r);
}

Eigen::MatrixXd NoiseModel::whiten(const Eigen::MatrixXd& H) const {
  if (H.rows() != dim_) throw DimensionError("jacobian rows do not match noise model");
  if (diagonal_) return inv_sigmas_.asDiagonal() * H;
  return chol_lower_.triangularView<Eigen::Lower>().solve(H);
}

}  // namespace kdfg
