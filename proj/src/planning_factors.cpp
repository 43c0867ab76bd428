#include "kdfg/planning_factors.hpp"

#include "kdfg/dynamics.hpp"
#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

using Vec6 = Vector6<double>;
using Mat6 = Matrix6<double>;

std::uint32_t u(int i) { return static_cast<std::uint32_t>(i); }

Vec6 vec6(const Values& values, const Key& k) {
  const Eigen::VectorXd& x = values.at(k);
  if (x.size() != 6) throw DimensionError(to_string(k) + " must have dimension 6");
  return x;
}

/// Ad of T_{j,j-1}(q) = (home exp([A] q))^-1.
Mat6 child_from_parent_adjoint(const RobotModel& model, int j, double q) {
  return adjoint_map(model.parentFromChild(j, q).inverse());
}

std::vector<Key> twist_keys(int j, int t) {
  std::vector<Key> k{Q(u(j), u(t)), DQ(u(j), u(t)), TwistKey(u(j), u(t))};
  if (j > 0) k.push_back(TwistKey(u(j - 1), u(t)));
  return k;
}

std::vector<Key> accel_keys(int j, int t) {
  std::vector<Key> k{Q(u(j), u(t)), DQ(u(j), u(t)), DDQ(u(j), u(t)), TwistKey(u(j), u(t)), TwistAccelKey(u(j), u(t))};
  if (j > 0) k.push_back(TwistAccelKey(u(j - 1), u(t)));
  return k;
}

std::vector<Key> wrench_keys(int j, int t, int n) {
  std::vector<Key> k{TwistKey(u(j), u(t)), TwistAccelKey(u(j), u(t)), WrenchKey(u(j), u(t))};
  if (j + 1 < n) {
    k.push_back(WrenchKey(u(j + 1), u(t)));
    k.push_back(Q(u(j + 1), u(t)));
  }
  return k;
}

std::vector<Key> joint_angle_keys(int count, int t) {
  std::vector<Key> k;
  for (int j = 0; j < count; ++j) k.push_back(Q(u(j), u(t)));
  return k;
}

void check_joint(const ModelPtr& model, int joint) {
  if (!model) throw Error("null robot model");
  if (joint < 0 || joint >= model->numJoints()) throw Error("joint index out of range");
}

}  // namespace

TwistFactor::TwistFactor(ModelPtr model, int joint, int step, NoiseModel noise)
    : Factor(twist_keys(joint, step), std::move(noise)), model_(std::move(model)), joint_(joint) {
  check_joint(model_, joint_);
}

Eigen::VectorXd TwistFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const auto& k = keys();
  const double q = values.scalar(k[0]);
  const double qd = values.scalar(k[1]);
  const Vec6 V = vec6(values, k[2]);
  const Vec6 V_prev = joint_ > 0 ? vec6(values, k[3]) : Vec6::Zero();
  const auto& A = model_->joint(joint_).screw_axis;
  const Mat6 Ad = child_from_parent_adjoint(*model_, joint_, q);
  const Vec6 transported = Ad * V_prev;
  if (jacobians) {
    jacobians->clear();
    jacobians->push_back(ad_operator(A) * transported);
    jacobians->push_back(-A);
    jacobians->push_back(Mat6::Identity());
    if (joint_ > 0) jacobians->push_back(-Ad);
  }
  return V - transported - A * qd;
}

AccelFactor::AccelFactor(ModelPtr model, int joint, int step, NoiseModel noise)
    : Factor(accel_keys(joint, step), std::move(noise)), model_(std::move(model)), joint_(joint) {
  check_joint(model_, joint_);
}

Eigen::VectorXd AccelFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const auto& k = keys();
  const double q = values.scalar(k[0]);
  const double qd = values.scalar(k[1]);
  const double qdd = values.scalar(k[2]);
  const Vec6 V = vec6(values, k[3]);
  const Vec6 Acc = vec6(values, k[4]);
  const Vec6 A_prev = joint_ > 0 ? vec6(values, k[5]) : Vec6(model_->baseAcceleration());
  const auto& S = model_->joint(joint_).screw_axis;
  const Mat6 Ad = child_from_parent_adjoint(*model_, joint_, q);
  const Vec6 transported = Ad * A_prev;
  const Vec6 adVS = ad_operator(V) * S;
  if (jacobians) {
    jacobians->clear();
    jacobians->push_back(ad_operator(S) * transported);
    jacobians->push_back(-adVS);
    jacobians->push_back(-S);
    // ad_V S = -ad_S V
    jacobians->push_back(qd * ad_operator(S));
    jacobians->push_back(Mat6::Identity());
    if (joint_ > 0) jacobians->push_back(-Ad);
  }
  return Acc - transported - adVS * qd - S * qdd;
}

WrenchFactor::WrenchFactor(ModelPtr model, int joint, int step, NoiseModel noise)
    : Factor(wrench_keys(joint, step, model ? model->numJoints() : 0), std::move(noise)),
      model_(std::move(model)),
      joint_(joint) {
  check_joint(model_, joint_);
}

Eigen::VectorXd WrenchFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const auto& k = keys();
  const bool has_child = joint_ + 1 < model_->numJoints();
  const Vec6 V = vec6(values, k[0]);
  const Vec6 Acc = vec6(values, k[1]);
  const Vec6 F = vec6(values, k[2]);
  const Mat6& G = model_->inertiaMatrix(joint_);
  const Vec6 GV = G * V;
  const Mat6 adV = ad_operator(V);
  Vec6 rhs = G * Acc - adV.transpose() * GV;
  Mat6 Ad_child;
  Vec6 F_child = Vec6::Zero();
  if (has_child) {
    F_child = vec6(values, k[3]);
    Ad_child = child_from_parent_adjoint(*model_, joint_ + 1, values.scalar(k[4]));
    rhs += Ad_child.transpose() * F_child;
  }
  if (jacobians) {
    jacobians->clear();
    jacobians->push_back(ad_transpose_jacobian(GV) + adV.transpose() * G);
    jacobians->push_back(-G);
    jacobians->push_back(Mat6::Identity());
    if (has_child) {
      const auto& S = model_->joint(joint_ + 1).screw_axis;
      jacobians->push_back(-Ad_child.transpose());
      jacobians->push_back(Ad_child.transpose() * ad_operator(S).transpose() * F_child);
    }
  }
  return F - rhs;
}

TorqueFactor::TorqueFactor(ModelPtr model, int joint, int step, NoiseModel noise)
    : Factor({WrenchKey(u(joint), u(step)), TorqueKey(u(joint), u(step))}, std::move(noise)) {
  check_joint(model, joint);
  axis_ = model->joint(joint).screw_axis;
}

Eigen::VectorXd TorqueFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Vec6 F = vec6(values, keys()[0]);
  const double tau = values.scalar(keys()[1]);
  if (jacobians) {
    jacobians->clear();
    jacobians->push_back(-axis_.transpose());
    jacobians->push_back(Eigen::MatrixXd::Ones(1, 1));
  }
  return Eigen::VectorXd::Constant(1, tau - F.dot(axis_));
}

LimitHinge limit_residual(double z, double z_l, double z_u, double eps, double a) {
  if (z - z_l <= eps) return {a * (z_l - z + eps), -a};
  if (z_u - z <= eps) return {a * (z - z_u + eps), a};
  return {0.0, 0.0};
}

LimitFactor::LimitFactor(const Key& key, double z_l, double z_u, double eps, double a, NoiseModel noise)
    : Factor({key}, std::move(noise)), z_l_(z_l), z_u_(z_u), eps_(eps), a_(a) {
  if (!(z_l + eps < z_u - eps)) {
    throw ConfigError("limits", 0, "degenerate limit corridor for " + to_string(key));
  }
  if (!(eps >= 0) || !(a > 0)) throw ConfigError("limits", 0, "hinge needs eps >= 0 and a > 0");
}

Eigen::VectorXd LimitFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const LimitHinge h = limit_residual(values.scalar(keys()[0]), z_l_, z_u_, eps_, a_);
  if (jacobians) jacobians->assign(1, Eigen::MatrixXd::Constant(1, 1, h.derivative));
  return Eigen::VectorXd::Constant(1, h.cost);
}

namespace {
std::vector<Key> torque_keys(int joints, int t) {
  std::vector<Key> k;
  for (int j = 0; j < joints; ++j) k.push_back(TorqueKey(u(j), u(t)));
  return k;
}
}  // namespace

MinTorqueFactor::MinTorqueFactor(int joints, int step, NoiseModel noise)
    : Factor(torque_keys(joints, step), std::move(noise)) {}

Eigen::VectorXd MinTorqueFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const int n = static_cast<int>(keys().size());
  Eigen::VectorXd tau(n);
  for (int j = 0; j < n; ++j) tau(j) = values.scalar(keys()[j]);
  if (jacobians) {
    jacobians->clear();
    for (int j = 0; j < n; ++j) jacobians->push_back(Eigen::VectorXd::Unit(n, j));
  }
  return tau;
}

Eigen::VectorXd pose_residual(const RobotModel& model, const Eigen::VectorXd& q, const Pose& target,
                              Eigen::MatrixXd* jacobian) {
  const auto fk = forward_kinematics(model, q);
  const Pose& T = fk.end_effector;
  const Matrix3<double> Rt = target.rotation().transpose();
  const Eigen::Vector3d phi = rotation_log<double>(Rt * T.rotation());
  Eigen::VectorXd r(6);
  r.head<3>() = phi;
  r.tail<3>() = Rt * (T.translation() - target.translation());
  if (jacobian) {
    const int n = model.numJoints();
    jacobian->setZero(6, n);
    const Matrix3<double> Jr_inv = rotation_right_jacobian_inverse<double>(phi);
    const Matrix3<double> RT = T.rotation().transpose();
    for (int k = 0; k < n; ++k) {
      const Twist<double> S = adjoint_map(fk.link_poses[k]) * model.joint(k).screw_axis;
      const Eigen::Vector3d w = S.head<3>();
      jacobian->block<3, 1>(0, k) = Jr_inv * (RT * w);
      jacobian->block<3, 1>(3, k) = Rt * (w.cross(T.translation()) + S.tail<3>());
    }
  }
  return r;
}

PoseFactor::PoseFactor(ModelPtr model, int step, Pose target, NoiseModel noise)
    : Factor(joint_angle_keys(model ? model->numJoints() : 0, step), std::move(noise)),
      model_(std::move(model)),
      target_(std::move(target)) {
  if (!model_) throw Error("null robot model");
}

Eigen::VectorXd PoseFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const int n = model_->numJoints();
  Eigen::VectorXd q(n);
  for (int j = 0; j < n; ++j) q(j) = values.scalar(keys()[j]);
  Eigen::MatrixXd J;
  const Eigen::VectorXd r = pose_residual(*model_, q, target_, jacobians ? &J : nullptr);
  if (jacobians) {
    jacobians->clear();
    for (int j = 0; j < n; ++j) jacobians->push_back(J.col(j));
  }
  return r;
}

ObstacleFactor::ObstacleFactor(ModelPtr model, SdfPtr sdf, int link, int sphere, int step, double eps,
                               NoiseModel noise)
    : Factor(joint_angle_keys(link + 1, step), std::move(noise)),
      model_(std::move(model)),
      sdf_(std::move(sdf)),
      link_(link),
      sphere_(sphere),
      eps_(eps) {
  check_joint(model_, link_);
  if (!sdf_) throw Error("obstacle factor needs an sdf");
  if (sphere < 0 || sphere >= static_cast<int>(model_->link(link).spheres.size())) {
    throw Error("sphere index out of range");
  }
}

Eigen::VectorXd ObstacleFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(model_->numJoints());
  for (int j = 0; j <= link_; ++j) q(j) = values.scalar(keys()[j]);
  const auto& s = model_->link(link_).spheres[sphere_];
  const auto [p, Jp] = point_jacobian(*model_, q, link_, s.offset);
  const SdfQuery sq = sdf_->query(p);
  const HingeValue h = hinge_cost_sdf(sq.distance - s.radius, eps_);
  if (jacobians) {
    jacobians->clear();
    const Eigen::RowVectorXd row = h.derivative * sq.gradient.transpose() * Jp;
    for (int j = 0; j <= link_; ++j) jacobians->push_back(Eigen::MatrixXd::Constant(1, 1, row(j)));
  }
  return Eigen::VectorXd::Constant(1, h.cost);
}

}  // namespace kdfg
