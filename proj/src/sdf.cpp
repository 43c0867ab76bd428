#include "kdfg/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "kdfg/dynamics.hpp"
#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

constexpr char kMagic[8] = {'K', 'D', 'F', 'G', 'S', 'D', 'F', '1'};

double box_distance(const BoxObstacle& b, const Eigen::Vector3d& p) {
  const Eigen::Vector3d q = (p - b.center).cwiseAbs() - 0.5 * b.extents;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

}  // namespace

double ObstacleSet::signedDistance(const Eigen::Vector3d& p) const {
  double d = kNoObstacleDistance;
  for (const auto& b : boxes) d = std::min(d, box_distance(b, p));
  for (const auto& s : spheres) d = std::min(d, (p - s.center).norm() - s.radius);
  return d;
}

ObstacleSet ObstacleSet::translated(const Eigen::Vector3d& offset) const {
  ObstacleSet out = *this;
  for (auto& b : out.boxes) b.center += offset;
  for (auto& s : out.spheres) s.center += offset;
  return out;
}

SdfGrid::SdfGrid(GridSpec spec, std::vector<double> data) : spec_(std::move(spec)), data_(std::move(data)) {
  if (!(spec_.cell_size > 0.0)) throw Error("sdf cell_size must be positive");
  for (int d : spec_.dims) {
    if (d < 1) throw Error("sdf dims must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(spec_.dims[0]) * spec_.dims[1] * spec_.dims[2];
  if (data_.size() != n) throw Error("sdf data size does not match dims");
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error("sdf data must be finite");
  }
}

SdfQuery SdfGrid::query(const Eigen::Vector3d& p) const {
  SdfQuery out;
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  std::array<bool, 3> flat{};  // axis with no variation at this point (clamped or single cell)
  for (int a = 0; a < 3; ++a) {
    const int n = spec_.dims[a];
    double f = (p(a) - spec_.origin(a)) / spec_.cell_size;
    if (f < 0.0 || f > n - 1) {
      out.clamped = true;
      f = std::clamp(f, 0.0, static_cast<double>(n - 1));
      flat[a] = true;
    }
    if (n == 1) {
      i0[a] = 0;
      t[a] = 0.0;
      flat[a] = true;
      continue;
    }
    int i = static_cast<int>(std::floor(f));
    i = std::clamp(i, 0, n - 2);
    i0[a] = i;
    t[a] = f - i;
  }
  auto val = [&](int dx, int dy, int dz) {
    const int i = std::min(i0[0] + dx, spec_.dims[0] - 1);
    const int j = std::min(i0[1] + dy, spec_.dims[1] - 1);
    const int k = std::min(i0[2] + dz, spec_.dims[2] - 1);
    return at(i, j, k);
  };
  double c[2][2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) c[dx][dy][dz] = val(dx, dy, dz);

  const double tx = t[0], ty = t[1], tz = t[2];
  auto lerp = [](double a, double b, double s) { return a + (b - a) * s; };
  // Interpolate along z, then y, then x.
  double cz[2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy) cz[dx][dy] = lerp(c[dx][dy][0], c[dx][dy][1], tz);
  const double cy0 = lerp(cz[0][0], cz[0][1], ty);
  const double cy1 = lerp(cz[1][0], cz[1][1], ty);
  out.distance = lerp(cy0, cy1, tx);

  const double ddx = cy1 - cy0;
  const double ddy = lerp(cz[0][1] - cz[0][0], cz[1][1] - cz[1][0], tx);
  double dz[2][2];
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy) dz[dx][dy] = c[dx][dy][1] - c[dx][dy][0];
  const double ddz = lerp(lerp(dz[0][0], dz[0][1], ty), lerp(dz[1][0], dz[1][1], ty), tx);
  out.gradient = Eigen::Vector3d(flat[0] ? 0.0 : ddx, flat[1] ? 0.0 : ddy, flat[2] ? 0.0 : ddz) / spec_.cell_size;
  return out;
}

void SdfGrid::saveBinary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(spec_.origin.data()), 3 * sizeof(double));
  out.write(reinterpret_cast<const char*>(&spec_.cell_size), sizeof(double));
  for (int d : spec_.dims) {
    const std::int64_t v = d;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(double)));
}

void SdfGrid::saveText(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << spec_.origin(0) << ' ' << spec_.origin(1) << ' ' << spec_.origin(2) << ' ' << spec_.cell_size << ' '
      << spec_.dims[0] << ' ' << spec_.dims[1] << ' ' << spec_.dims[2] << '\n';
  for (std::size_t i = 0; i < data_.size(); ++i) out << data_[i] << ((i + 1) % spec_.dims[2] == 0 ? '\n' : ' ');
}

SdfGrid SdfGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open sdf file " + path.string());
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  GridSpec spec;
  std::vector<double> data;
  if (in.gcount() == sizeof(magic) && std::memcmp(magic, kMagic, sizeof(magic)) == 0) {
    in.read(reinterpret_cast<char*>(spec.origin.data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(&spec.cell_size), sizeof(double));
    for (auto& d : spec.dims) {
      std::int64_t v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (v < 1 || v > std::numeric_limits<int>::max()) throw Error("bad sdf dims in " + path.string());
      d = static_cast<int>(v);
    }
    const std::size_t n = static_cast<std::size_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2];
    data.resize(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double)) throw Error("truncated sdf file " + path.string());
  } else {
    in.clear();
    in.seekg(0);
    if (!(in >> spec.origin(0) >> spec.origin(1) >> spec.origin(2) >> spec.cell_size >> spec.dims[0] >> spec.dims[1] >>
          spec.dims[2])) {
      throw Error("bad sdf text header in " + path.string());
    }
    const std::size_t n = static_cast<std::size_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2];
    data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(in >> data[i])) throw Error("truncated sdf file " + path.string());
    }
  }
  return SdfGrid(spec, std::move(data));
}

SdfGrid build_sdf(const ObstacleSet& obstacles, const GridSpec& spec) {
  std::vector<double> data(static_cast<std::size_t>(spec.dims[0]) * spec.dims[1] * spec.dims[2]);
  std::size_t idx = 0;
  for (int i = 0; i < spec.dims[0]; ++i)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int k = 0; k < spec.dims[2]; ++k) {
        const Eigen::Vector3d p = spec.origin + spec.cell_size * Eigen::Vector3d(i, j, k);
        data[idx++] = obstacles.signedDistance(p);
      }
  return SdfGrid(spec, std::move(data));
}

HingeValue hinge_cost_sdf(double d, double eps) {
  if (d <= eps) return {eps - d, d < eps ? -1.0 : 0.0};
  return {0.0, 0.0};
}

std::pair<Eigen::Vector3d, Eigen::MatrixXd> point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, int link,
                                                           const Eigen::Vector3d& offset) {
  const auto fk = forward_kinematics(model, q);
  const Eigen::Vector3d p = fk.link_poses.at(link).transformPoint(offset);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, model.numJoints());
  for (int k = 0; k <= link; ++k) {
    const Twist<double> S = adjoint_map(fk.link_poses[k]) * model.joint(k).screw_axis;
    J.col(k) = S.head<3>().cross(p) + S.tail<3>();
  }
  return {p, J};
}

std::vector<SpherePlacement> sphere_placements(const RobotModel& model, const Eigen::VectorXd& q) {
  const auto fk = forward_kinematics(model, q);
  std::vector<SpherePlacement> out;
  for (int j = 0; j < model.numJoints(); ++j) {
    const auto& spheres = model.link(j).spheres;
    for (int s = 0; s < static_cast<int>(spheres.size()); ++s) {
      out.push_back({j, s, fk.link_poses[j].transformPoint(spheres[s].offset), spheres[s].radius});
    }
  }
  return out;
}

ObstacleResidual obstacle_residual(const RobotModel& model, const SdfGrid& sdf, const Eigen::VectorXd& q, double eps) {
  const int ns = model.numSpheres();
  ObstacleResidual out;
  out.cost = Eigen::VectorXd::Zero(ns);
  out.clearance = Eigen::VectorXd::Zero(ns);
  out.jacobian = Eigen::MatrixXd::Zero(ns, model.numJoints());
  int row = 0;
  for (int j = 0; j < model.numJoints(); ++j) {
    for (const auto& s : model.link(j).spheres) {
      const auto [p, Jp] = point_jacobian(model, q, j, s.offset);
      const SdfQuery sq = sdf.query(p);
      out.clamped = out.clamped || sq.clamped;
      const double d = sq.distance - s.radius;
      const HingeValue h = hinge_cost_sdf(d, eps);
      out.cost(row) = h.cost;
      out.clearance(row) = d;
      out.jacobian.row(row) = h.derivative * sq.gradient.transpose() * Jp;
      ++row;
    }
  }
  return out;
}

}  // namespace kdfg
