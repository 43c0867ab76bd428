#pragma once

// Screw-theory spatial algebra. All 6-vectors are angular-first:
// twists are (omega, v), wrenches are (moment, force), screw axes (w, v).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace kdfg {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;

template <typename Scalar = double>
using Twist = Vector6<Scalar>;
template <typename Scalar = double>
using Wrench = Vector6<Scalar>;
template <typename Scalar = double>
using ScrewAxis = Vector6<Scalar>;

template <typename Derived>
Matrix3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> m;
  m << Scalar(0), -w(2), w(1),
       w(2), Scalar(0), -w(0),
       -w(1), w(0), Scalar(0);
  return m;
}

/// Rigid transform stored as rotation + translation. Maps points from the
/// child frame into the parent frame: p_parent = R * p_child + t.
template <typename Scalar = double>
class PoseTransform {
 public:
  PoseTransform() : rotation_(Matrix3<Scalar>::Identity()), translation_(Vector3<Scalar>::Zero()) {}
  PoseTransform(const Matrix3<Scalar>& rotation, const Vector3<Scalar>& translation)
      : rotation_(rotation), translation_(translation) {}

  static PoseTransform Identity() { return PoseTransform(); }
  static PoseTransform Translation(const Vector3<Scalar>& t) {
    return PoseTransform(Matrix3<Scalar>::Identity(), t);
  }

  const Matrix3<Scalar>& rotation() const { return rotation_; }
  const Vector3<Scalar>& translation() const { return translation_; }

  PoseTransform operator*(const PoseTransform& other) const {
    return PoseTransform(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
  }

  PoseTransform inverse() const {
    Matrix3<Scalar> rt = rotation_.transpose();
    return PoseTransform(rt, -rt * translation_);
  }

  Vector3<Scalar> transformPoint(const Vector3<Scalar>& p) const { return rotation_ * p + translation_; }

  Eigen::Matrix<Scalar, 4, 4> matrix() const {
    Eigen::Matrix<Scalar, 4, 4> m = Eigen::Matrix<Scalar, 4, 4>::Identity();
    m.template topLeftCorner<3, 3>() = rotation_;
    m.template topRightCorner<3, 1>() = translation_;
    return m;
  }

  bool isApprox(const PoseTransform& other, Scalar tol) const {
    return (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol &&
           (translation_ - other.translation_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Matrix3<Scalar> rotation_;
  Vector3<Scalar> translation_;
};

using Pose = PoseTransform<double>;

/// Ad_T = [[R, 0], [[p]R, R]].
template <typename Scalar>
Matrix6<Scalar> adjoint_map(const PoseTransform<Scalar>& T) {
  Matrix6<Scalar> ad = Matrix6<Scalar>::Zero();
  ad.template topLeftCorner<3, 3>() = T.rotation();
  ad.template bottomRightCorner<3, 3>() = T.rotation();
  ad.template bottomLeftCorner<3, 3>() = skew(T.translation()) * T.rotation();
  return ad;
}

/// Lie bracket matrix ad_V = [[[w], 0], [[v], [w]]].
template <typename Derived>
Matrix6<typename Derived::Scalar> ad_operator(const Eigen::MatrixBase<Derived>& V) {
  using Scalar = typename Derived::Scalar;
  Matrix6<Scalar> m = Matrix6<Scalar>::Zero();
  const Matrix3<Scalar> w = skew(V.template head<3>());
  m.template topLeftCorner<3, 3>() = w;
  m.template bottomRightCorner<3, 3>() = w;
  m.template bottomLeftCorner<3, 3>() = skew(V.template tail<3>());
  return m;
}

/// Matrix C(y) with C(y) * V == ad_V^T * y for every V (ad_V^T y is linear in V).
template <typename Derived>
Matrix6<typename Derived::Scalar> ad_transpose_jacobian(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  Matrix6<Scalar> c;
  for (int k = 0; k < 6; ++k) {
    c.col(k) = ad_operator(Vector6<Scalar>::Unit(k)).transpose() * y;
  }
  return c;
}

template <typename Derived>
Matrix3<typename Derived::Scalar> rotation_exp(const Eigen::MatrixBase<Derived>& phi) {
  using Scalar = typename Derived::Scalar;
  const Scalar theta = phi.norm();
  const Matrix3<Scalar> k = skew(phi);
  if (theta < Scalar(1e-9)) {
    return Matrix3<Scalar>::Identity() + k + Scalar(0.5) * k * k;
  }
  return Matrix3<Scalar>::Identity() + std::sin(theta) / theta * k +
         (Scalar(1) - std::cos(theta)) / (theta * theta) * k * k;
}

/// Rotation vector of R, with |result| in [0, pi].
template <typename Scalar>
Vector3<Scalar> rotation_log(const Matrix3<Scalar>& R) {
  const Scalar cos_theta = std::clamp((R.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  const Scalar theta = std::acos(cos_theta);
  Vector3<Scalar> w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (theta < Scalar(1e-6)) {
    return Scalar(0.5) * (Scalar(1) + theta * theta / Scalar(6)) * w;
  }
  if (Scalar(M_PI) - theta < Scalar(1e-6)) {
    // Near pi: recover the axis from the symmetric part.
    const Matrix3<Scalar> B = (R + Matrix3<Scalar>::Identity()) / Scalar(2);
    int i = 0;
    B.diagonal().maxCoeff(&i);
    Vector3<Scalar> axis = B.col(i) / std::sqrt(std::max(B(i, i), Scalar(1e-300)));
    axis.normalize();
    if (axis.dot(w) < Scalar(0)) axis = -axis;
    return theta * axis;
  }
  return theta / (Scalar(2) * std::sin(theta)) * w;
}

/// Inverse of the SO(3) right Jacobian at phi.
template <typename Scalar>
Matrix3<Scalar> rotation_right_jacobian_inverse(const Vector3<Scalar>& phi) {
  const Scalar theta = phi.norm();
  const Matrix3<Scalar> k = skew(phi);
  if (theta < Scalar(1e-6)) {
    return Matrix3<Scalar>::Identity() + Scalar(0.5) * k + k * k / Scalar(12);
  }
  const Scalar coeff = Scalar(1) / (theta * theta) -
                       (Scalar(1) + std::cos(theta)) / (Scalar(2) * theta * std::sin(theta));
  return Matrix3<Scalar>::Identity() + Scalar(0.5) * k + coeff * k * k;
}

/// exp([A] q): the rigid motion of moving q along screw A.
template <typename Scalar>
PoseTransform<Scalar> exp_screw(const ScrewAxis<Scalar>& A, Scalar q) {
  const Vector3<Scalar> w = A.template head<3>();
  const Vector3<Scalar> v = A.template tail<3>();
  const Scalar wn = w.norm();
  if (wn < Scalar(1e-12)) {
    return PoseTransform<Scalar>(Matrix3<Scalar>::Identity(), v * q);
  }
  // Rodrigues for a unit rotation axis; non-unit axes are scaled to pitch form.
  const Vector3<Scalar> wu = w / wn;
  const Vector3<Scalar> vu = v / wn;
  const Scalar theta = q * wn;
  const Matrix3<Scalar> k = skew(wu);
  const Matrix3<Scalar> R = Matrix3<Scalar>::Identity() + std::sin(theta) * k +
                            (Scalar(1) - std::cos(theta)) * k * k;
  const Matrix3<Scalar> G = Matrix3<Scalar>::Identity() * theta + (Scalar(1) - std::cos(theta)) * k +
                            (theta - std::sin(theta)) * k * k;
  return PoseTransform<Scalar>(R, G * vu);
}

/// 6x6 spatial inertia about a body frame whose origin is offset from the
/// centre of mass. `inertia_com` is the rotational inertia about the COM,
/// expressed in the body frame axes.
template <typename Scalar = double>
class SpatialInertia {
 public:
  SpatialInertia() : mass_(0), inertia_com_(Matrix3<Scalar>::Zero()), com_(Vector3<Scalar>::Zero()) {}
  SpatialInertia(Scalar mass, const Matrix3<Scalar>& inertia_com, const Vector3<Scalar>& com)
      : mass_(mass), inertia_com_(inertia_com), com_(com) {}

  Scalar mass() const { return mass_; }
  const Matrix3<Scalar>& inertiaAboutCom() const { return inertia_com_; }
  const Vector3<Scalar>& com() const { return com_; }

  Matrix6<Scalar> matrix() const {
    const Matrix3<Scalar> c = skew(com_);
    Matrix6<Scalar> g;
    g.template topLeftCorner<3, 3>() = inertia_com_ + mass_ * c * c.transpose();
    g.template topRightCorner<3, 3>() = mass_ * c;
    g.template bottomLeftCorner<3, 3>() = mass_ * c.transpose();
    g.template bottomRightCorner<3, 3>() = mass_ * Matrix3<Scalar>::Identity();
    return g;
  }

  bool isPositiveDefinite() const {
    if (!(mass_ > Scalar(0))) return false;
    Eigen::SelfAdjointEigenSolver<Matrix6<Scalar>> es(matrix());
    return es.eigenvalues().minCoeff() > Scalar(0);
  }

 private:
  Scalar mass_;
  Matrix3<Scalar> inertia_com_;
  Vector3<Scalar> com_;
};

}  // namespace kdfg
