#include "kdfg/robot_model.hpp"

#include "kdfg/errors.hpp"

namespace kdfg {

RobotModel::RobotModel(std::string name, std::vector<JointSpec> joints, std::vector<LinkSpec> links,
                       Eigen::Vector3d gravity, Pose end_effector)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      links_(std::move(links)),
      gravity_(std::move(gravity)),
      end_effector_(std::move(end_effector)) {
  if (joints_.empty()) throw Error("robot model needs at least one joint");
  if (joints_.size() != links_.size()) throw Error("robot model needs one link per joint");
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const auto& js = joints_[j];
    const std::string where = "joint " + std::to_string(j);
    const double wn = js.screw_axis.head<3>().norm();
    if (wn > 0.0 && std::abs(wn - 1.0) > 1e-9) throw Error(where + ": revolute screw axis must be unit length");
    if (wn == 0.0 && js.screw_axis.tail<3>().norm() == 0.0) throw Error(where + ": zero screw axis");
    const auto& l = js.limits;
    if (!(l.q_min < l.q_max)) throw Error(where + ": q_min must be below q_max");
    if (!(l.vel_max > 0 && l.acc_max > 0 && l.torque_max > 0)) throw Error(where + ": limits must be positive");
    if (!links_[j].inertia.isPositiveDefinite()) {
      throw Error("link " + std::to_string(j) + ": spatial inertia is not positive definite");
    }
    for (const auto& s : links_[j].spheres) {
      if (!(s.radius > 0)) throw Error("link " + std::to_string(j) + ": sphere radius must be positive");
    }
    inertia_matrices_.push_back(links_[j].inertia.matrix());
  }
}

Pose RobotModel::parentFromChild(int j, double q) const {
  const auto& js = joints_.at(j);
  return js.home * exp_screw<double>(js.screw_axis, q);
}

Twist<double> RobotModel::baseAcceleration() const {
  Twist<double> a = Twist<double>::Zero();
  a.tail<3>() = -gravity_;
  return a;
}

int RobotModel::numSpheres() const {
  int n = 0;
  for (const auto& l : links_) n += static_cast<int>(l.spheres.size());
  return n;
}

}  // namespace kdfg
