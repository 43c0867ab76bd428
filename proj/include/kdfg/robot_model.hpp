#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "kdfg/spatial.hpp"

namespace kdfg {

struct JointLimits {
  double q_min = -M_PI;
  double q_max = M_PI;
  double vel_max = 1.0;
  double acc_max = 1.0;
  double torque_max = 1.0;
};

struct JointSpec {
  ScrewAxis<double> screw_axis = ScrewAxis<double>::Zero();  // in the child link frame
  Pose home;                                                 // child frame in parent frame at q = 0
  JointLimits limits;
  bool actuated = true;
};

struct CollisionSphere {
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // in the link frame
  double radius = 0.0;
};

struct LinkSpec {
  SpatialInertia<double> inertia;
  std::vector<CollisionSphere> spheres;
};

/// Serial chain, root to tip. Joint j drives link j.
class RobotModel {
 public:
  RobotModel(std::string name, std::vector<JointSpec> joints, std::vector<LinkSpec> links,
             Eigen::Vector3d gravity = Eigen::Vector3d(0, 0, -9.81), Pose end_effector = Pose());

  const std::string& name() const { return name_; }
  int numJoints() const { return static_cast<int>(joints_.size()); }
  const JointSpec& joint(int j) const { return joints_.at(j); }
  const LinkSpec& link(int j) const { return links_.at(j); }
  const Eigen::Vector3d& gravity() const { return gravity_; }
  const Pose& endEffector() const { return end_effector_; }

  /// 6x6 spatial inertia of link j about its own frame.
  const Matrix6<double>& inertiaMatrix(int j) const { return inertia_matrices_.at(j); }

  /// Link j frame expressed in link j-1 frame (base for j = 0): home * exp([A] q).
  Pose parentFromChild(int j, double q) const;

  /// Spatial acceleration of the base that emulates gravity: (0, -g).
  Twist<double> baseAcceleration() const;

  int numSpheres() const;

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<LinkSpec> links_;
  Eigen::Vector3d gravity_;
  Pose end_effector_;
  std::vector<Matrix6<double>> inertia_matrices_;
};

}  // namespace kdfg
