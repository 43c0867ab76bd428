#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <vector>

#include "kdfg/robot_model.hpp"

namespace kdfg {

/// Axis-aligned box; `extents` are full side lengths.
struct BoxObstacle {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d extents = Eigen::Vector3d::Ones();
};

struct SphereObstacle {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
};

struct ObstacleSet {
  std::vector<BoxObstacle> boxes;
  std::vector<SphereObstacle> spheres;

  bool empty() const { return boxes.empty() && spheres.empty(); }
  /// Exact signed distance to the union (negative inside); kNoObstacleDistance if empty.
  double signedDistance(const Eigen::Vector3d& p) const;
  ObstacleSet translated(const Eigen::Vector3d& offset) const;
};

inline constexpr double kNoObstacleDistance = 1e6;

struct GridSpec {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();  // location of cell (0, 0, 0)
  double cell_size = 0.05;
  std::array<int, 3> dims{1, 1, 1};
};

struct SdfQuery {
  double distance = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  bool clamped = false;  // point was outside the grid and projected onto its boundary
};

/// Regular grid of signed distances. Cell (i, j, k) sits at origin + cell_size * (i, j, k);
/// storage is row-major with x slowest: index = (i * ny + j) * nz + k.
class SdfGrid {
 public:
  SdfGrid(GridSpec spec, std::vector<double> data);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& data() const { return data_; }
  double at(int i, int j, int k) const { return data_[index(i, j, k)]; }

  /// Trilinear interpolation; the gradient is the exact derivative of the interpolant.
  SdfQuery query(const Eigen::Vector3d& p) const;

  void saveBinary(const std::filesystem::path& path) const;
  void saveText(const std::filesystem::path& path) const;
  /// Reads either format (binary files start with the "KDFGSDF1" magic).
  static SdfGrid load(const std::filesystem::path& path);

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * spec_.dims[1] + j) * spec_.dims[2] + k;
  }
  GridSpec spec_;
  std::vector<double> data_;
};

SdfGrid build_sdf(const ObstacleSet& obstacles, const GridSpec& spec);

struct HingeValue {
  double cost = 0.0;
  double derivative = 0.0;
};

/// eps - d for d <= eps, else 0. Derivative -1 for d < eps, 0 at and beyond eps.
HingeValue hinge_cost_sdf(double d, double eps);

/// World position of every collision sphere centre, in link order.
struct SpherePlacement {
  int link = 0;
  int index = 0;  // within the link
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
};
std::vector<SpherePlacement> sphere_placements(const RobotModel& model, const Eigen::VectorXd& q);

struct ObstacleResidual {
  Eigen::VectorXd cost;      // one entry per sphere
  Eigen::MatrixXd jacobian;  // spheres x joints
  Eigen::VectorXd clearance; // sdf distance minus radius, per sphere
  bool clamped = false;
};

/// Hinge obstacle cost of every collision sphere at configuration q.
ObstacleResidual obstacle_residual(const RobotModel& model, const SdfGrid& sdf, const Eigen::VectorXd& q, double eps);

/// Position and d(position)/dq (3 x joints; zero beyond `link`) of a point fixed in link `link`.
std::pair<Eigen::Vector3d, Eigen::MatrixXd> point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, int link,
                                                           const Eigen::Vector3d& offset);

}  // namespace kdfg
