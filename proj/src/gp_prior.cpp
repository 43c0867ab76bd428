#include "kdfg/gp_prior.hpp"

#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& small, int d) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(small.rows() * d, small.cols() * d);
  for (int r = 0; r < small.rows(); ++r)
    for (int c = 0; c < small.cols(); ++c) out.block(r * d, c * d, d, d) = small(r, c) * Eigen::MatrixXd::Identity(d, d);
  return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& small, const Eigen::MatrixXd& Q) {
  const int d = static_cast<int>(Q.rows());
  Eigen::MatrixXd out(small.rows() * d, small.cols() * d);
  for (int r = 0; r < small.rows(); ++r)
    for (int c = 0; c < small.cols(); ++c) out.block(r * d, c * d, d, d) = small(r, c) * Q;
  return out;
}

}  // namespace

Eigen::MatrixXd gp_transition(double dt, int d, GpOrder order) {
  if (!(dt > 0)) throw Error("gp transition needs dt > 0");
  Eigen::MatrixXd phi;
  if (order == GpOrder::kConstantVelocity) {
    phi.resize(2, 2);
    phi << 1, dt, 0, 1;
  } else {
    phi.resize(3, 3);
    phi << 1, dt, 0.5 * dt * dt, 0, 1, dt, 0, 0, 1;
  }
  return kron_identity(phi, d);
}

Eigen::MatrixXd gp_covariance(double dt, const Eigen::MatrixXd& Qc, GpOrder order,
                              bool standard_position_coefficient) {
  if (!(dt > 0)) throw Error("gp covariance needs dt > 0");
  if (Qc.rows() != Qc.cols() || Qc.rows() == 0) throw DimensionError("Q_C must be square");
  const double dt2 = dt * dt, dt3 = dt2 * dt, dt4 = dt3 * dt, dt5 = dt4 * dt;
  Eigen::MatrixXd m;
  if (order == GpOrder::kConstantVelocity) {
    m.resize(2, 2);
    m << dt3 / 3, dt2 / 2, dt2 / 2, dt;
  } else {
    m.resize(3, 3);
    const double c00 = standard_position_coefficient ? dt5 / 20 : dt5 / 2;
    m << c00, dt4 / 8, dt3 / 6,
         dt4 / 8, dt3 / 3, dt2 / 2,
         dt3 / 6, dt2 / 2, dt;
  }
  return kron(m, Qc);
}

std::vector<Key> GpPriorFactor::stateKeys(int joints, int step, GpOrder order) {
  std::vector<Key> keys;
  const auto t = static_cast<std::uint32_t>(step);
  for (int j = 0; j < joints; ++j) keys.push_back(Q(j, t));
  for (int j = 0; j < joints; ++j) keys.push_back(DQ(j, t));
  if (order == GpOrder::kConstantAcceleration) {
    for (int j = 0; j < joints; ++j) keys.push_back(DDQ(j, t));
  }
  return keys;
}

namespace {
std::vector<Key> gp_keys(int joints, int step_prev, GpOrder order) {
  auto keys = GpPriorFactor::stateKeys(joints, step_prev, order);
  const auto next = GpPriorFactor::stateKeys(joints, step_prev + 1, order);
  keys.insert(keys.end(), next.begin(), next.end());
  return keys;
}
}  // namespace

GpPriorFactor::GpPriorFactor(int joints, int step_prev, double dt, const GpPriorSpec& spec)
    : Factor(gp_keys(joints, step_prev, spec.order),
             NoiseModel::Covariance(gp_covariance(dt, spec.Qc, spec.order, spec.standard_position_coefficient))),
      joints_(joints),
      block_(spec.order == GpOrder::kConstantVelocity ? 2 : 3),
      Phi_(gp_transition(dt, joints, spec.order)) {
  if (spec.Qc.rows() != joints) throw DimensionError("Q_C dimension must equal the joint count");
}

Eigen::VectorXd GpPriorFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const int n = block_ * joints_;
  Eigen::VectorXd prev(n), next(n);
  for (int k = 0; k < n; ++k) {
    prev(k) = values.scalar(keys()[k]);
    next(k) = values.scalar(keys()[n + k]);
  }
  if (jacobians) {
    jacobians->resize(2 * n);
    for (int k = 0; k < n; ++k) {
      (*jacobians)[k] = -Phi_.col(k);
      (*jacobians)[n + k] = Eigen::VectorXd::Unit(n, k);
    }
  }
  return next - Phi_ * prev;
}

}  // namespace kdfg
