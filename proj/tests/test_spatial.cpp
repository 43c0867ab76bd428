#include "doctest.h"

#include "kdfg/spatial.hpp"
#include "test_util.hpp"

using namespace kdfg;

TEST_SUITE("spatial") {

TEST_CASE("adjoint of the inverse is the inverse adjoint") {
  test::Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const Pose T = test::random_pose(rng);
    CHECK(test::max_abs(adjoint_map(T.inverse()) - adjoint_map(T).inverse()) < 1e-9);
  }
}

TEST_CASE("adjoint and ad act linearly") {
  test::Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const Pose T = test::random_pose(rng);
    const Twist<double> V1 = test::random_vector(rng, 6), V2 = test::random_vector(rng, 6), W = test::random_vector(rng, 6);
    const double a = test::uniform(rng, -3, 3), b = test::uniform(rng, -3, 3);
    const Matrix6<double> Ad = adjoint_map(T);
    CHECK(test::max_abs(Ad * (a * V1 + b * V2) - (a * Ad * V1 + b * Ad * V2)) < 1e-12);
    CHECK(test::max_abs(ad_operator(W) * (a * V1 + b * V2) - (a * ad_operator(W) * V1 + b * ad_operator(W) * V2)) < 1e-12);
    // ad is also linear in its argument, and ad_V V = 0.
    CHECK(test::max_abs(ad_operator(Twist<double>(a * V1 + b * V2)) - (a * ad_operator(V1) + b * ad_operator(V2))) < 1e-12);
    CHECK(test::max_abs(ad_operator(V1) * V1) < 1e-12);
  }
}

TEST_CASE("adjoint maps twists consistently with the rigid motion") {
  // A body rotating with twist V in frame b has twist Ad_T V in frame a when T = T_ab.
  // Check through the velocity of a point: v_a(p_a) = R v_b(p_b).
  test::Rng rng(13);
  for (int k = 0; k < 50; ++k) {
    const Pose T = test::random_pose(rng);
    const Twist<double> Vb = test::random_vector(rng, 6);
    const Twist<double> Va = adjoint_map(T) * Vb;
    const Eigen::Vector3d pb = test::random_vector(rng, 3);
    const Eigen::Vector3d pa = T.transformPoint(pb);
    const Eigen::Vector3d vb = Vb.head<3>().cross(pb) + Vb.tail<3>();
    const Eigen::Vector3d va = Va.head<3>().cross(pa) + Va.tail<3>();
    CHECK(test::max_abs(va - T.rotation() * vb) < 1e-12);
  }
}

TEST_CASE("ad transpose jacobian") {
  test::Rng rng(14);
  const Twist<double> y = test::random_vector(rng, 6), V = test::random_vector(rng, 6);
  CHECK(test::max_abs(ad_transpose_jacobian(y) * V - ad_operator(V).transpose() * y) < 1e-12);
}

TEST_CASE("exp_screw keeps rotations orthonormal") {
  test::Rng rng(15);
  for (int k = 0; k < 200; ++k) {
    ScrewAxis<double> A = test::random_vector(rng, 6);
    A.head<3>().normalize();
    const double q = test::uniform(rng, -4 * M_PI, 4 * M_PI);
    const Pose T = exp_screw(A, q);
    CHECK(test::max_abs(T.rotation().transpose() * T.rotation() - Eigen::Matrix3d::Identity()) < 1e-9);
    CHECK(T.rotation().determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exp_screw of a pure rotation about an offset axis") {
  // Axis z through the point r = (1, 0, 0): v = -w x r = (0, -1, 0).
  ScrewAxis<double> A;
  A << 0, 0, 1, 0, -1, 0;
  const Pose T = exp_screw(A, M_PI);
  // Rotating the origin by pi about that axis lands at (2, 0, 0).
  CHECK(test::max_abs(T.transformPoint(Eigen::Vector3d::Zero()) - Eigen::Vector3d(2, 0, 0)) < 1e-12);
  ScrewAxis<double> P;
  P << 0, 0, 0, 0, 0, 1;
  CHECK(test::max_abs(exp_screw(P, 0.3).translation() - Eigen::Vector3d(0, 0, 0.3)) < 1e-15);
}

TEST_CASE("exp_screw composes along the same axis") {
  test::Rng rng(16);
  for (int k = 0; k < 50; ++k) {
    ScrewAxis<double> A = test::random_vector(rng, 6);
    A.head<3>().normalize();
    const double a = test::uniform(rng, -2, 2), b = test::uniform(rng, -2, 2);
    CHECK((exp_screw(A, a) * exp_screw(A, b)).isApprox(exp_screw(A, a + b), 1e-12));
  }
}

TEST_CASE("pose composition is associative and inverse cancels") {
  test::Rng rng(17);
  for (int k = 0; k < 100; ++k) {
    const Pose A = test::random_pose(rng), B = test::random_pose(rng), C = test::random_pose(rng);
    CHECK(((A * B) * C).isApprox(A * (B * C), 1e-12));
    CHECK((A * A.inverse()).isApprox(Pose::Identity(), 1e-12));
    CHECK(test::max_abs((A * B).matrix() - A.matrix() * B.matrix()) < 1e-12);
  }
}

TEST_CASE("rotation log inverts exp") {
  test::Rng rng(18);
  for (int k = 0; k < 200; ++k) {
    Eigen::Vector3d phi = test::random_vector(rng, 3);
    phi *= test::uniform(rng, 0, M_PI - 1e-3) / phi.norm();
    CHECK(test::max_abs(rotation_log(rotation_exp(phi)) - phi) < 1e-8);
  }
  CHECK(test::max_abs(rotation_log(Eigen::Matrix3d(Eigen::Matrix3d::Identity()))) == 0.0);
  const Eigen::Vector3d half_turn(0, M_PI, 0);
  CHECK(rotation_log(rotation_exp(half_turn)).norm() == doctest::Approx(M_PI).epsilon(1e-9));
}

TEST_CASE("spatial inertia realization is symmetric positive definite") {
  test::Rng rng(19);
  for (int k = 0; k < 100; ++k) {
    // Physically consistent: principal moments satisfy the triangle inequality.
    const double a = test::uniform(rng, 0.01, 1), b = test::uniform(rng, 0.01, 1);
    const double c = test::uniform(rng, std::abs(a - b) + 1e-3, a + b);
    const Eigen::Matrix3d R = rotation_exp(Eigen::Vector3d(test::random_vector(rng, 3, 3)));
    const Eigen::Matrix3d I = R * Eigen::Vector3d(a, b, c).asDiagonal() * R.transpose();
    const SpatialInertia<double> G(test::uniform(rng, 0.1, 10), I, Eigen::Vector3d(test::random_vector(rng, 3)));
    const Matrix6<double> M = G.matrix();
    CHECK(test::max_abs(M - M.transpose()) <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix6<double>> es(M);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(G.isPositiveDefinite());
  }
  CHECK_FALSE(SpatialInertia<double>(0.0, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()).isPositiveDefinite());
}

TEST_CASE("kinetic energy from spatial inertia matches the point-mass form") {
  // Uniform rod of mass m along x, COM at (0.5, 0, 0), spinning about the frame's z axis at rate w:
  // KE = 0.5 * (I_com + m c^2) w^2.
  const double m = 2.0, w = 3.0;
  const Eigen::Matrix3d Ic = Eigen::Vector3d(0.0, m / 12, m / 12).asDiagonal();
  const SpatialInertia<double> G(m, Ic, Eigen::Vector3d(0.5, 0, 0));
  Twist<double> V;
  V << 0, 0, w, 0, 0, 0;
  CHECK(0.5 * V.dot(G.matrix() * V) == doctest::Approx(0.5 * (m / 12 + m * 0.25) * w * w).epsilon(1e-14));
}

}  // TEST_SUITE
