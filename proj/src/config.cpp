#include "kdfg/config.hpp"

#include <fstream>
#include <sstream>

#include "kdfg/model_io.hpp"
#include "yaml_util.hpp"

namespace kdfg {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open " + what + " file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

Eigen::Vector3d vec3(const YAML::Node& n, const std::string& field) { return yaml::as_vector(n, field, 3); }

double positive(const YAML::Node& n, const std::string& field) {
  const double v = yaml::as_double(n, field);
  if (!(v > 0)) throw ConfigError(field, yaml::line_of(n), "must be positive");
  return v;
}

void read_obstacles(const YAML::Node& doc, const std::string& path, ObstacleSet& out) {
  if (const auto boxes = doc["boxes"]) {
    if (!boxes.IsSequence()) throw ConfigError(yaml::join(path, "boxes"), yaml::line_of(boxes), "expected a list");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const std::string bp = yaml::join(path, "boxes[" + std::to_string(i) + "]");
      yaml::check_keys(boxes[i], bp, {"center", "extents"});
      BoxObstacle b;
      b.center = vec3(yaml::require(boxes[i], bp, "center"), bp + ".center");
      b.extents = vec3(yaml::require(boxes[i], bp, "extents"), bp + ".extents");
      if ((b.extents.array() <= 0).any()) {
        throw ConfigError(bp + ".extents", yaml::line_of(boxes[i]["extents"]), "extents must be positive");
      }
      out.boxes.push_back(b);
    }
  }
  if (const auto spheres = doc["spheres"]) {
    if (!spheres.IsSequence()) throw ConfigError(yaml::join(path, "spheres"), yaml::line_of(spheres), "expected a list");
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      const std::string sp = yaml::join(path, "spheres[" + std::to_string(i) + "]");
      yaml::check_keys(spheres[i], sp, {"center", "radius"});
      SphereObstacle s;
      s.center = vec3(yaml::require(spheres[i], sp, "center"), sp + ".center");
      s.radius = positive(yaml::require(spheres[i], sp, "radius"), sp + ".radius");
      out.spheres.push_back(s);
    }
  }
}

Scene scene_from_node(const YAML::Node& doc, const fs::path& base_dir, const std::string& path) {
  yaml::check_keys(doc, path, {"epsilon", "grid", "boxes", "spheres", "sdf_file"});
  Scene scene;
  if (const auto e = doc["epsilon"]) {
    scene.epsilon = yaml::as_double(e, yaml::join(path, "epsilon"));
    if (!(scene.epsilon >= 0)) throw ConfigError(yaml::join(path, "epsilon"), yaml::line_of(e), "must be non-negative");
  }
  read_obstacles(doc, path, scene.obstacles);
  if (const auto f = doc["sdf_file"]) {
    const fs::path file = resolve(base_dir, yaml::as_string(f, yaml::join(path, "sdf_file")));
    try {
      scene.sdf = std::make_shared<const SdfGrid>(SdfGrid::load(file));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(yaml::join(path, "sdf_file"), yaml::line_of(f), e.what());
    }
    scene.grid = scene.sdf->spec();
    return scene;
  }
  const std::string gp = yaml::join(path, "grid");
  const YAML::Node grid = yaml::require(doc, path, "grid");
  yaml::check_keys(grid, gp, {"origin", "cell_size", "dims"});
  scene.grid.origin = vec3(yaml::require(grid, gp, "origin"), gp + ".origin");
  scene.grid.cell_size = positive(yaml::require(grid, gp, "cell_size"), gp + ".cell_size");
  const YAML::Node dims = yaml::require(grid, gp, "dims");
  const Eigen::VectorXd d = yaml::as_vector(dims, gp + ".dims", 3);
  for (int i = 0; i < 3; ++i) {
    if (d(i) < 1 || d(i) != std::floor(d(i))) throw ConfigError(gp + ".dims", yaml::line_of(dims), "dims must be positive integers");
    scene.grid.dims[i] = static_cast<int>(d(i));
  }
  return make_scene(scene.obstacles, scene.grid, scene.epsilon);
}

JointState state_from_node(const YAML::Node& n, const std::string& path, int joints) {
  yaml::check_keys(n, path, {"q", "qd", "qdd"});
  JointState s = JointState::AtRest(yaml::as_vector(yaml::require(n, path, "q"), path + ".q", joints));
  if (const auto v = n["qd"]) s.qd = yaml::as_vector(v, path + ".qd", joints);
  if (const auto a = n["qdd"]) s.qdd = yaml::as_vector(a, path + ".qdd", joints);
  return s;
}

Eigen::MatrixXd qc_from_node(const YAML::Node& n, int joints) {
  if (n.IsScalar()) {
    const double s = positive(n, "q_c");
    return s * Eigen::MatrixXd::Identity(joints, joints);
  }
  if (!n.IsSequence()) throw ConfigError("q_c", yaml::line_of(n), "expected a number, a diagonal or a matrix");
  if (n.size() > 0 && n[0].IsSequence()) {
    if (static_cast<int>(n.size()) != joints) {
      throw ConfigError("q_c", yaml::line_of(n), "expected " + std::to_string(joints) + " rows");
    }
    Eigen::MatrixXd Q(joints, joints);
    for (int r = 0; r < joints; ++r) Q.row(r) = yaml::as_vector(n[r], "q_c", joints).transpose();
    return Q;
  }
  return yaml::as_vector(n, "q_c", joints).asDiagonal();
}

void read_toggles(const YAML::Node& f, const std::string& path, FactorToggles& t) {
  yaml::check_keys(f, path, {"obstacles", "limits", "min_torque"});
  if (const auto v = f["obstacles"]) t.obstacles = yaml::as_bool(v, path + ".obstacles");
  if (const auto v = f["limits"]) t.limits = yaml::as_bool(v, path + ".limits");
  if (const auto v = f["min_torque"]) t.min_torque = yaml::as_bool(v, path + ".min_torque");
}

void read_solver(const YAML::Node& s, LMParams& lm, PlanningProblem& p) {
  yaml::check_keys(s, "solver",
                   {"max_iterations", "lambda_initial", "lambda_factor", "lambda_max", "relative_tolerance",
                    "absolute_tolerance", "ordering", "damping", "second_order_correction", "project_equalities",
                    "projection_iterations"});
  if (const auto v = s["max_iterations"]) {
    lm.max_iterations = yaml::as_int(v, "solver.max_iterations");
    if (lm.max_iterations < 1) throw ConfigError("solver.max_iterations", yaml::line_of(v), "must be at least 1");
  }
  if (const auto v = s["lambda_initial"]) lm.lambda_initial = positive(v, "solver.lambda_initial");
  if (const auto v = s["lambda_factor"]) {
    lm.lambda_factor = yaml::as_double(v, "solver.lambda_factor");
    if (!(lm.lambda_factor > 1)) throw ConfigError("solver.lambda_factor", yaml::line_of(v), "must exceed 1");
  }
  if (const auto v = s["lambda_max"]) lm.lambda_max = positive(v, "solver.lambda_max");
  if (const auto v = s["relative_tolerance"]) lm.relative_tolerance = positive(v, "solver.relative_tolerance");
  if (const auto v = s["absolute_tolerance"]) lm.absolute_tolerance = positive(v, "solver.absolute_tolerance");
  if (const auto v = s["ordering"]) {
    const std::string o = yaml::as_string(v, "solver.ordering");
    if (o == "forward") {
      lm.ordering = OrderingType::kForward;
    } else if (o == "mindegree") {
      lm.ordering = OrderingType::kMinDegree;
    } else {
      throw ConfigError("solver.ordering", yaml::line_of(v), "expected forward or mindegree");
    }
  }
  if (const auto v = s["damping"]) {
    const std::string d = yaml::as_string(v, "solver.damping");
    if (d == "identity") {
      lm.damping = DampingType::kIdentity;
    } else if (d == "diagonal") {
      lm.damping = DampingType::kDiagonal;
    } else {
      throw ConfigError("solver.damping", yaml::line_of(v), "expected identity or diagonal");
    }
  }
  if (const auto v = s["second_order_correction"]) {
    lm.second_order_correction = yaml::as_bool(v, "solver.second_order_correction");
  }
  if (const auto v = s["project_equalities"]) p.project_equalities = yaml::as_bool(v, "solver.project_equalities");
  if (const auto v = s["projection_iterations"]) {
    p.projection_iterations = yaml::as_int(v, "solver.projection_iterations");
    if (p.projection_iterations < 1) {
      throw ConfigError("solver.projection_iterations", yaml::line_of(v), "must be at least 1");
    }
  }
}

}  // namespace

ModelPtr resolve_model(const std::string& ref, const fs::path& base_dir) {
  const fs::path as_path = resolve(base_dir, ref);
  const bool looks_like_path = ref.find('/') != std::string::npos || as_path.extension() == ".yaml" ||
                               as_path.extension() == ".yml";
  if (looks_like_path || fs::exists(as_path)) {
    return std::make_shared<const RobotModel>(load_model_file(as_path));
  }
  const fs::path bundled = data_dir() / "models" / (ref + ".yaml");
  if (!fs::exists(bundled)) throw ConfigError("model", 0, "no bundled model or file named '" + ref + "'");
  return std::make_shared<const RobotModel>(load_model_file(bundled));
}

Scene parse_scene(const std::string& text, const fs::path& base_dir, const std::string& source) {
  const YAML::Node doc = yaml::load_text(text, source);
  return scene_from_node(doc, base_dir, "");
}

Scene load_scene_file(const fs::path& path) {
  return parse_scene(read_file(path, "scene"), path.parent_path(), path.string());
}

ObstacleSet parse_obstacles(const std::string& text, const std::string& source) {
  const YAML::Node doc = yaml::load_text(text, source);
  yaml::check_keys(doc, "", {"boxes", "spheres", "offset", "epsilon", "grid", "sdf_file"});
  ObstacleSet out;
  read_obstacles(doc, "", out);
  if (const auto o = doc["offset"]) out = out.translated(vec3(o, "offset"));
  return out;
}

ObstacleSet apply_scene_delta(const std::string& text, const ObstacleSet& current, const std::string& source) {
  const YAML::Node doc = yaml::load_text(text, source);
  yaml::check_keys(doc, "", {"boxes", "spheres", "offset"});
  ObstacleSet out = current;
  if (doc["boxes"] || doc["spheres"]) {
    out = {};
    read_obstacles(doc, "", out);
  }
  if (const auto o = doc["offset"]) out = out.translated(vec3(o, "offset"));
  return out;
}

ProblemConfig parse_problem_config(const std::string& text, const fs::path& base_dir, const std::string& source) {
  const YAML::Node doc = yaml::load_text(text, source);
  yaml::check_keys(doc, "",
                   {"model", "start", "goal", "goal_mode", "horizon", "steps", "scene", "factors", "sigmas", "q_c", "gp",
                    "limits", "solver", "replan", "success", "output"});
  ProblemConfig cfg;
  cfg.source = source;
  PlanningProblem& p = cfg.problem;

  const YAML::Node model = yaml::require(doc, "", "model");
  try {
    p.model = resolve_model(yaml::as_string(model, "model"), base_dir);
  } catch (const ConfigError& e) {
    if (e.line() > 0 || e.field() != "model") throw;
    throw ConfigError("model", yaml::line_of(model), e.what());
  }
  const int n = p.model->numJoints();

  p.start = state_from_node(yaml::require(doc, "", "start"), "start", n);
  const YAML::Node goal = yaml::require(doc, "", "goal");
  if (goal.IsMap() && goal["pose"]) {
    yaml::check_keys(goal, "goal", {"pose"});
    const YAML::Node pose = goal["pose"];
    yaml::check_keys(pose, "goal.pose", {"rotation", "translation"});
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    if (const auto r = pose["rotation"]) {
      const Eigen::VectorXd v = yaml::as_vector(r, "goal.pose.rotation", 9);
      R = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
      if ((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 || R.determinant() < 0) {
        throw ConfigError("goal.pose.rotation", yaml::line_of(r), "rotation must be orthonormal with determinant +1");
      }
    }
    p.goal = Pose(R, vec3(yaml::require(pose, "goal.pose", "translation"), "goal.pose.translation"));
  } else {
    p.goal = state_from_node(goal, "goal", n);
  }
  if (const auto m = doc["goal_mode"]) {
    const std::string s = yaml::as_string(m, "goal_mode");
    if (s == "full") {
      p.goal_mode = GoalMode::kFullState;
    } else if (s == "position") {
      p.goal_mode = GoalMode::kPositionOnly;
    } else {
      throw ConfigError("goal_mode", yaml::line_of(m), "expected full or position");
    }
  }
  if (const auto h = doc["horizon"]) p.horizon = positive(h, "horizon");
  if (const auto s = doc["steps"]) {
    p.steps = yaml::as_int(s, "steps");
    if (p.steps < 2) throw ConfigError("steps", yaml::line_of(s), "need at least 2 steps");
  }
  if (const auto s = doc["scene"]) {
    if (s.IsScalar()) {
      const fs::path file = resolve(base_dir, yaml::as_string(s, "scene"));
      p.scene = load_scene_file(file);
    } else {
      p.scene = scene_from_node(s, base_dir, "scene");
    }
  }
  if (const auto f = doc["factors"]) read_toggles(f, "factors", p.toggles);
  if (const auto s = doc["sigmas"]) {
    yaml::check_keys(s, "sigmas", {"start_goal", "dynamics", "obstacle", "limits", "min_torque", "unactuated", "pose"});
    auto read = [&](const char* key, double& out) {
      if (const auto v = s[key]) out = positive(v, std::string("sigmas.") + key);
    };
    read("start_goal", p.sigmas.start_goal);
    read("dynamics", p.sigmas.dynamics);
    read("obstacle", p.sigmas.obstacle);
    read("limits", p.sigmas.limits);
    read("min_torque", p.sigmas.min_torque);
    read("unactuated", p.sigmas.unactuated);
    read("pose", p.sigmas.pose);
  }
  if (const auto q = doc["q_c"]) p.gp.Qc = qc_from_node(q, n);
  if (const auto g = doc["gp"]) {
    yaml::check_keys(g, "gp", {"order", "standard_coefficient"});
    if (const auto o = g["order"]) {
      const std::string s = yaml::as_string(o, "gp.order");
      if (s == "constant_acceleration") {
        p.gp.order = GpOrder::kConstantAcceleration;
      } else if (s == "constant_velocity") {
        p.gp.order = GpOrder::kConstantVelocity;
      } else {
        throw ConfigError("gp.order", yaml::line_of(o), "expected constant_acceleration or constant_velocity");
      }
    }
    if (const auto c = g["standard_coefficient"]) {
      p.gp.standard_position_coefficient = yaml::as_bool(c, "gp.standard_coefficient");
    }
  }
  if (const auto l = doc["limits"]) {
    yaml::check_keys(l, "limits", {"hinge_gain", "margin_fraction"});
    if (const auto v = l["hinge_gain"]) p.hinge_gain = positive(v, "limits.hinge_gain");
    if (const auto v = l["margin_fraction"]) {
      p.margin_fraction = yaml::as_double(v, "limits.margin_fraction");
      if (!(p.margin_fraction >= 0 && p.margin_fraction < 0.5)) {
        throw ConfigError("limits.margin_fraction", yaml::line_of(v), "must be in [0, 0.5)");
      }
    }
  }
  if (const auto s = doc["solver"]) read_solver(s, p.lm, p);
  if (const auto r = doc["replan"]) {
    yaml::check_keys(r, "replan", {"relinearize_threshold", "max_updates"});
    if (const auto v = r["relinearize_threshold"]) p.relinearize_threshold = positive(v, "replan.relinearize_threshold");
    if (const auto v = r["max_updates"]) {
      p.max_replan_updates = yaml::as_int(v, "replan.max_updates");
      if (p.max_replan_updates < 0) throw ConfigError("replan.max_updates", yaml::line_of(v), "must be non-negative");
    }
  }
  if (const auto s = doc["success"]) {
    yaml::check_keys(s, "success", {"tol_eq", "limit_slack", "min_clearance"});
    if (const auto v = s["tol_eq"]) p.success.tol_eq = positive(v, "success.tol_eq");
    if (const auto v = s["limit_slack"]) p.success.limit_slack = yaml::as_double(v, "success.limit_slack");
    if (const auto v = s["min_clearance"]) p.success.min_clearance = yaml::as_double(v, "success.min_clearance");
  }
  if (const auto o = doc["output"]) {
    yaml::check_keys(o, "output", {"trajectory_csv", "trajectory_json", "stats_json", "plot_data"});
    auto read = [&](const char* key, fs::path& out) {
      if (const auto v = o[key]) out = yaml::as_string(v, std::string("output.") + key);
    };
    read("trajectory_csv", cfg.output.trajectory_csv);
    read("trajectory_json", cfg.output.trajectory_json);
    read("stats_json", cfg.output.stats_json);
    read("plot_data", cfg.output.plot_data);
  }
  p.validate();
  return cfg;
}

ProblemConfig load_problem_config(const fs::path& path) {
  return parse_problem_config(read_file(path, "config"), path.parent_path(), path.string());
}

Eigen::VectorXd parse_joint_vector(const std::string& text, int expected, const std::string& field) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(field, 0, "'" + tok + "' is not a number");
    }
  }
  if (static_cast<int>(vals.size()) != expected) {
    throw ConfigError(field, 0, "expected " + std::to_string(expected) + " values, got " + std::to_string(vals.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), expected);
}

BenchmarkSuite parse_suite(const std::string& text, const fs::path& base_dir, const std::string& source) {
  const YAML::Node doc = yaml::load_text(text, source);
  yaml::check_keys(doc, "", {"config", "mode", "trials", "seed", "goal_margin", "perturbation", "factors"});
  BenchmarkSuite suite;
  suite.source = source;
  const YAML::Node cfg = yaml::require(doc, "", "config");
  const fs::path cfg_path = resolve(base_dir, yaml::as_string(cfg, "config"));
  suite.base = load_problem_config(cfg_path);
  if (const auto m = doc["mode"]) {
    const std::string s = yaml::as_string(m, "mode");
    if (s == "plan") {
      suite.mode = SuiteMode::kPlan;
    } else if (s == "replan") {
      suite.mode = SuiteMode::kReplan;
    } else {
      throw ConfigError("mode", yaml::line_of(m), "expected plan or replan");
    }
  }
  if (const auto t = doc["trials"]) {
    suite.trials = yaml::as_int(t, "trials");
    if (suite.trials < 1) throw ConfigError("trials", yaml::line_of(t), "must be at least 1");
  }
  if (const auto s = doc["seed"]) {
    const int seed = yaml::as_int(s, "seed");
    if (seed < 0) throw ConfigError("seed", yaml::line_of(s), "must be non-negative");
    suite.seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto g = doc["goal_margin"]) {
    suite.goal_margin = yaml::as_double(g, "goal_margin");
    if (!(suite.goal_margin >= 0 && suite.goal_margin < 1)) {
      throw ConfigError("goal_margin", yaml::line_of(g), "must be in [0, 1)");
    }
  }
  if (const auto d = doc["perturbation"]) {
    suite.perturbation = yaml::as_double(d, "perturbation");
    if (!(suite.perturbation >= 0)) throw ConfigError("perturbation", yaml::line_of(d), "must be non-negative");
  }
  if (const auto f = doc["factors"]) read_toggles(f, "factors", suite.base.problem.toggles);
  return suite;
}

BenchmarkSuite load_suite_file(const fs::path& path) {
  return parse_suite(read_file(path, "suite"), path.parent_path(), path.string());
}

}  // namespace kdfg
