#include "kdfg/dynamics.hpp"

#include <Eigen/Cholesky>

#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

void check_length(const RobotModel& model, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != model.numJoints()) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) + ", model has " +
                         std::to_string(model.numJoints()) + " joints");
  }
}

}  // namespace

KinematicsResult forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_length(model, q, "q");
  KinematicsResult out;
  Pose T;
  for (int j = 0; j < model.numJoints(); ++j) {
    T = T * model.parentFromChild(j, q(j));
    out.link_poses.push_back(T);
  }
  out.end_effector = T * model.endEffector();
  return out;
}

RneaResult rnea(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                const Eigen::VectorXd& qdd, bool with_gravity) {
  check_length(model, q, "q");
  check_length(model, qd, "qd");
  check_length(model, qdd, "qdd");
  const int n = model.numJoints();
  RneaResult r;
  r.twists.resize(n);
  r.accelerations.resize(n);
  r.wrenches.resize(n);
  r.torques.resize(n);

  std::vector<Matrix6<double>> ad_child_from_parent(n);
  Twist<double> V_prev = Twist<double>::Zero();
  Twist<double> A_prev = with_gravity ? model.baseAcceleration() : Twist<double>::Zero();
  for (int j = 0; j < n; ++j) {
    const auto& A = model.joint(j).screw_axis;
    ad_child_from_parent[j] = adjoint_map(model.parentFromChild(j, q(j)).inverse());
    r.twists[j] = ad_child_from_parent[j] * V_prev + A * qd(j);
    r.accelerations[j] = ad_child_from_parent[j] * A_prev + ad_operator(r.twists[j]) * A * qd(j) + A * qdd(j);
    V_prev = r.twists[j];
    A_prev = r.accelerations[j];
  }

  Wrench<double> F_next = Wrench<double>::Zero();
  for (int j = n - 1; j >= 0; --j) {
    const auto& G = model.inertiaMatrix(j);
    Wrench<double> F = G * r.accelerations[j] - ad_operator(r.twists[j]).transpose() * (G * r.twists[j]);
    if (j + 1 < n) F += ad_child_from_parent[j + 1].transpose() * F_next;
    r.wrenches[j] = F;
    r.torques(j) = F.dot(model.joint(j).screw_axis);
    F_next = F;
  }
  return r;
}

Eigen::VectorXd rnea_inverse_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                      const Eigen::VectorXd& qdd) {
  return rnea(model, q, qd, qdd).torques;
}

Eigen::MatrixXd mass_matrix(const RobotModel& model, const Eigen::VectorXd& q) {
  const int n = model.numJoints();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd M(n, n);
  for (int k = 0; k < n; ++k) {
    M.col(k) = rnea(model, q, zero, Eigen::VectorXd::Unit(n, k), false).torques;
  }
  return M;
}

Eigen::VectorXd forward_dynamics(const RobotModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                 const Eigen::VectorXd& tau) {
  check_length(model, tau, "tau");
  const int n = model.numJoints();
  const Eigen::VectorXd bias = rnea(model, q, qd, Eigen::VectorXd::Zero(n)).torques;
  const Eigen::MatrixXd M = mass_matrix(model, q);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw Error("mass matrix is singular or not positive definite");
  return llt.solve(tau - bias);
}

}  // namespace kdfg
