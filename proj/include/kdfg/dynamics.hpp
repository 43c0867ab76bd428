#pragma once

#include <Eigen/Core>

#include <vector>

#include "kdfg/robot_model.hpp"

namespace kdfg {

struct KinematicsResult {
  std::vector<Pose> link_poses;  // link frames in the base frame
  Pose end_effector;
};

KinematicsResult forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/// Full recursive Newton-Euler state: per-link twists, twist accelerations,
/// wrenches (all in the link frame) and joint torques.
struct RneaResult {
  std::vector<Twist<double>> twists;
  std::vector<Twist<double>> accelerations;
  std::vector<Wrench<double>> wrenches;
  Eigen::VectorXd torques;
};

/// Recursive Newton-Euler with gravity injected as base acceleration and zero tip wrench.
RneaResult rnea(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                const Eigen::VectorXd& qdd, bool with_gravity = true);

Eigen::VectorXd rnea_inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                      const Eigen::VectorXd& qdd);

/// Joint-space mass matrix, assembled column by column from unit-acceleration RNEA calls.
Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q);

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau);

}  // namespace kdfg
