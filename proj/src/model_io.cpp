#include "kdfg/model_io.hpp"

#include <Eigen/SVD>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "yaml_util.hpp"

#ifndef KDFG_DATA_DIR
#define KDFG_DATA_DIR "data"
#endif

namespace kdfg {

namespace {

Matrix3<double> parse_rotation(const YAML::Node& n, const std::string& field) {
  const Eigen::VectorXd v = yaml::as_vector(n, field, 9);
  Matrix3<double> R;
  R << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);
  if ((R.transpose() * R - Matrix3<double>::Identity()).cwiseAbs().maxCoeff() > 1e-6 || R.determinant() <= 0.0) {
    throw ConfigError(field, yaml::line_of(n), "rotation must be orthonormal with determinant +1");
  }
  // Re-orthonormalize once at load time.
  Eigen::JacobiSVD<Matrix3<double>> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Pose parse_pose(const YAML::Node& n, const std::string& path) {
  yaml::check_keys(n, path, {"rotation", "translation"});
  Matrix3<double> R = Matrix3<double>::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  if (n["rotation"]) R = parse_rotation(n["rotation"], path + ".rotation");
  if (n["translation"]) t = yaml::as_vector(n["translation"], path + ".translation", 3);
  return Pose(R, t);
}

}  // namespace

RobotModel parse_model(const std::string& text, const std::string& source) {
  const YAML::Node root = yaml::load_text(text, source);
  yaml::check_keys(root, "", {"robot"});
  const YAML::Node robot = yaml::require(root, "", "robot");
  yaml::check_keys(robot, "robot", {"name", "gravity", "joints", "links", "end_effector"});

  const std::string name = robot["name"] ? yaml::as_string(robot["name"], "robot.name") : source;
  Eigen::Vector3d gravity(0, 0, -9.81);
  if (robot["gravity"]) gravity = yaml::as_vector(robot["gravity"], "robot.gravity", 3);

  const YAML::Node joints = yaml::require(robot, "robot", "joints");
  const YAML::Node links = yaml::require(robot, "robot", "links");
  if (!joints.IsSequence() || joints.size() == 0) {
    throw ConfigError("robot.joints", yaml::line_of(joints), "expected a non-empty list");
  }
  if (!links.IsSequence() || links.size() != joints.size()) {
    throw ConfigError("robot.links", yaml::line_of(links), "expected one link per joint");
  }

  std::vector<JointSpec> js;
  std::vector<LinkSpec> ls;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string path = "robot.joints[" + std::to_string(i) + "]";
    const YAML::Node jn = joints[i];
    yaml::check_keys(jn, path, {"axis", "home", "limits", "actuated"});
    JointSpec j;
    j.screw_axis = yaml::as_vector(yaml::require(jn, path, "axis"), path + ".axis", 6);
    const double wn = j.screw_axis.head<3>().norm();
    if (wn > 0.0 && std::abs(wn - 1.0) > 1e-9) {
      throw ConfigError(path + ".axis", yaml::line_of(jn["axis"]), "revolute axis must have unit angular part");
    }
    if (wn == 0.0 && j.screw_axis.tail<3>().norm() == 0.0) {
      throw ConfigError(path + ".axis", yaml::line_of(jn["axis"]), "zero screw axis");
    }
    if (jn["home"]) j.home = parse_pose(jn["home"], path + ".home");
    const YAML::Node lim = yaml::require(jn, path, "limits");
    const std::string lp = path + ".limits";
    yaml::check_keys(lim, lp, {"q_min", "q_max", "vel_max", "acc_max", "torque_max"});
    j.limits.q_min = yaml::as_double(yaml::require(lim, lp, "q_min"), lp + ".q_min");
    j.limits.q_max = yaml::as_double(yaml::require(lim, lp, "q_max"), lp + ".q_max");
    j.limits.vel_max = yaml::as_double(yaml::require(lim, lp, "vel_max"), lp + ".vel_max");
    j.limits.acc_max = yaml::as_double(yaml::require(lim, lp, "acc_max"), lp + ".acc_max");
    j.limits.torque_max = yaml::as_double(yaml::require(lim, lp, "torque_max"), lp + ".torque_max");
    if (!(j.limits.q_min < j.limits.q_max)) {
      throw ConfigError(lp + ".q_min", yaml::line_of(lim["q_min"]), "q_min must be below q_max");
    }
    for (const char* k : {"vel_max", "acc_max", "torque_max"}) {
      if (!(yaml::as_double(lim[k], lp + "." + k) > 0.0)) {
        throw ConfigError(lp + "." + k, yaml::line_of(lim[k]), "must be positive");
      }
    }
    if (jn["actuated"]) j.actuated = yaml::as_bool(jn["actuated"], path + ".actuated");
    js.push_back(j);

    const std::string lpath = "robot.links[" + std::to_string(i) + "]";
    const YAML::Node ln = links[i];
    yaml::check_keys(ln, lpath, {"mass", "inertia", "com", "spheres"});
    const double mass = yaml::as_double(yaml::require(ln, lpath, "mass"), lpath + ".mass");
    const Eigen::VectorXd iv = yaml::as_vector(yaml::require(ln, lpath, "inertia"), lpath + ".inertia", 9);
    Matrix3<double> I;
    I << iv(0), iv(1), iv(2), iv(3), iv(4), iv(5), iv(6), iv(7), iv(8);
    if ((I - I.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ConfigError(lpath + ".inertia", yaml::line_of(ln["inertia"]), "inertia must be symmetric");
    }
    Eigen::Vector3d com = Eigen::Vector3d::Zero();
    if (ln["com"]) com = yaml::as_vector(ln["com"], lpath + ".com", 3);
    LinkSpec l;
    l.inertia = SpatialInertia<double>(mass, I, com);
    if (!l.inertia.isPositiveDefinite()) {
      throw ConfigError(lpath, yaml::line_of(ln), "link " + std::to_string(i) + " spatial inertia is not positive definite");
    }
    if (ln["spheres"]) {
      const YAML::Node sn = ln["spheres"];
      if (!sn.IsSequence()) throw ConfigError(lpath + ".spheres", yaml::line_of(sn), "expected a list");
      for (std::size_t s = 0; s < sn.size(); ++s) {
        const std::string sp = lpath + ".spheres[" + std::to_string(s) + "]";
        yaml::check_keys(sn[s], sp, {"offset", "radius"});
        CollisionSphere cs;
        cs.offset = yaml::as_vector(yaml::require(sn[s], sp, "offset"), sp + ".offset", 3);
        cs.radius = yaml::as_double(yaml::require(sn[s], sp, "radius"), sp + ".radius");
        if (!(cs.radius > 0)) throw ConfigError(sp + ".radius", yaml::line_of(sn[s]["radius"]), "must be positive");
        l.spheres.push_back(cs);
      }
    }
    ls.push_back(l);
  }
  Pose ee;
  if (robot["end_effector"]) ee = parse_pose(robot["end_effector"], "robot.end_effector");
  return RobotModel(name, std::move(js), std::move(ls), gravity, ee);
}

RobotModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open model file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("KDFG_DATA_DIR"); env && *env) return env;
  return KDFG_DATA_DIR;
}

RobotModel bundled_model(const std::string& name) {
  return load_model_file(data_dir() / "models" / (name + ".yaml"));
}

}  // namespace kdfg
