#pragma once

#include <Eigen/Core>

#include "kdfg/factor.hpp"

namespace kdfg {

enum class GpOrder { kConstantAcceleration, kConstantVelocity };

struct GpPriorSpec {
  Eigen::MatrixXd Qc;  // d x d power-spectral density
  GpOrder order = GpOrder::kConstantAcceleration;
  /// Use dt^5/20 for the position block instead of dt^5/2.
  bool standard_position_coefficient = false;
};

/// State transition over dt for a d-dimensional configuration, state stacked as
/// [q; q'; q''] (or [q; q'] for constant velocity).
Eigen::MatrixXd gp_transition(double dt, int d, GpOrder order = GpOrder::kConstantAcceleration);

/// Process covariance over dt.
Eigen::MatrixXd gp_covariance(double dt, const Eigen::MatrixXd& Qc, GpOrder order = GpOrder::kConstantAcceleration,
                              bool standard_position_coefficient = false);

/// Smoothness factor x_i - Phi x_{i-1} between two consecutive steps, whitened by
/// the dense process covariance. Keys: q, v, (a) of every joint at step i-1, then at step i.
class GpPriorFactor : public Factor {
 public:
  GpPriorFactor(int joints, int step_prev, double dt, const GpPriorSpec& spec);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "gp_prior"; }

  static std::vector<Key> stateKeys(int joints, int step, GpOrder order);

 private:
  int joints_;
  int block_;  // 2 or 3
  Eigen::MatrixXd Phi_;
};

}  // namespace kdfg
