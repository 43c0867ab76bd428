#pragma once

#include <memory>

#include "kdfg/factor.hpp"
#include "kdfg/robot_model.hpp"
#include "kdfg/sdf.hpp"

namespace kdfg {

using ModelPtr = std::shared_ptr<const RobotModel>;
using SdfPtr = std::shared_ptr<const SdfGrid>;

// Newton-Euler equality factors at one time step. Joint j connects link j-1
// (the fixed base for j = 0) to link j; T_{j,j-1}(q) = (home_j exp([A_j] q))^-1.

/// V_j - (Ad_{T_{j,j-1}} V_{j-1} + A_j q'_j). Keys: q_j, v_j, V_j[, V_{j-1}].
class TwistFactor : public Factor {
 public:
  TwistFactor(ModelPtr model, int joint, int step, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "twist"; }

 private:
  ModelPtr model_;
  int joint_;
};

/// A_j - (Ad_{T_{j,j-1}} A_{j-1} + ad_{V_j} A_j q'_j + A_j q''_j); the base
/// acceleration emulates gravity. Keys: q_j, v_j, a_j, V_j, A_j[, A_{j-1}].
class AccelFactor : public Factor {
 public:
  AccelFactor(ModelPtr model, int joint, int step, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "accel"; }

 private:
  ModelPtr model_;
  int joint_;
};

/// F_j - (G_j A_j - ad_{V_j}^T G_j V_j + Ad_{T_{j+1,j}}^T F_{j+1}); zero tip wrench.
/// Keys: V_j, A_j, F_j[, F_{j+1}, q_{j+1}].
class WrenchFactor : public Factor {
 public:
  WrenchFactor(ModelPtr model, int joint, int step, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "wrench"; }

 private:
  ModelPtr model_;
  int joint_;
};

/// tau_j - F_j^T A_j. Keys: F_j, T_j.
class TorqueFactor : public Factor {
 public:
  TorqueFactor(ModelPtr model, int joint, int step, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "torque"; }

 private:
  ScrewAxis<double> axis_;
};

struct LimitHinge {
  double cost = 0.0;
  double derivative = 0.0;
};

/// a (z_l - z + eps) when z - z_l <= eps, a (z - z_u + eps) when z_u - z <= eps, else 0.
LimitHinge limit_residual(double z, double z_l, double z_u, double eps, double a);

/// Hinge on a scalar variable (joint angle, velocity, acceleration or torque).
class LimitFactor : public Factor {
 public:
  /// Throws ConfigError if z_l + eps >= z_u - eps.
  LimitFactor(const Key& key, double z_l, double z_u, double eps, double a, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "limit"; }
  double lower() const { return z_l_; }
  double upper() const { return z_u_; }

 private:
  double z_l_, z_u_, eps_, a_;
};

/// Per-joint torques at one step; squared, they give the sum of tau_j^2.
class MinTorqueFactor : public Factor {
 public:
  MinTorqueFactor(int joints, int step, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "min_torque"; }
};

/// Pose error (log(R_t^T R), R_t^T (p - p_t)) of the end effector (or any link
/// frame, with `link` and `offset`) against a target. Keys: q_0..q_{n-1} at `step`.
class PoseFactor : public Factor {
 public:
  PoseFactor(ModelPtr model, int step, Pose target, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "pose"; }
  const Pose& target() const { return target_; }

 private:
  ModelPtr model_;
  Pose target_;
};

/// Pose residual and its Jacobian (6 x joints) for configuration q.
Eigen::VectorXd pose_residual(const RobotModel& model, const Eigen::VectorXd& q, const Pose& target,
                              Eigen::MatrixXd* jacobian = nullptr);

/// Hinge obstacle cost of one collision sphere. Keys: q_0..q_link at `step`.
class ObstacleFactor : public Factor {
 public:
  ObstacleFactor(ModelPtr model, SdfPtr sdf, int link, int sphere, int step, double eps, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "obstacle"; }
  int link() const { return link_; }
  int sphere() const { return sphere_; }
  double eps() const { return eps_; }
  const SdfPtr& sdf() const { return sdf_; }

 private:
  ModelPtr model_;
  SdfPtr sdf_;
  int link_, sphere_;
  double eps_;
};

}  // namespace kdfg
