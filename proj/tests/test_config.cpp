#include "doctest.h"

#include <sstream>

#include "kdfg/config.hpp"
#include "kdfg/errors.hpp"
#include "kdfg/model_io.hpp"
#include "kdfg/trajectory_io.hpp"
#include "test_util.hpp"

using namespace kdfg;

namespace {

const std::string kBase =
    "model: arm3\n"
    "start: {q: [0, 0.5, -1.0]}\n"
    "goal: {q: [1.0, -0.3, 0.8]}\n"
    "horizon: 2\n"
    "steps: 20\n";

template <typename Fn>
ConfigError config_error(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("", 0, "");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a minimal problem parses with defaults") {
  const ProblemConfig c = parse_problem_config(kBase);
  CHECK(c.problem.model->numJoints() == 3);
  CHECK(c.problem.steps == 20);
  CHECK(c.problem.dt() == doctest::Approx(0.1));
  CHECK_FALSE(c.problem.scene.has_value());
  CHECK(c.problem.toggles.limits);
  CHECK_FALSE(c.problem.toggles.min_torque);
  CHECK(test::max_abs(std::get<JointState>(c.problem.goal).qd) == 0.0);
}

TEST_CASE("unknown keys are rejected with their line") {
  const auto e = config_error([] { parse_problem_config(kBase + "solver: {max_iterations: 5, turbo: true}\n"); });
  CHECK(e.field() == "solver.turbo");
  CHECK(e.line() == 6);
  const auto top = config_error([] { parse_problem_config(kBase + "\nbogus: 1\n"); });
  CHECK(top.field() == "bogus");
  CHECK(top.line() == 7);
}

TEST_CASE("field errors name the field") {
  CHECK(config_error([] { parse_problem_config(kBase + "q_c: -1\n"); }).field() == "q_c");
  CHECK(config_error([] { parse_problem_config(kBase + "solver: {ordering: colamd}\n"); }).field() == "solver.ordering");
  CHECK(config_error([] { parse_problem_config("model: nonexistent\n"); }).field() == "model");
  const auto goal = config_error([] {
    parse_problem_config("model: arm3\nstart: {q: [0, 0, 0]}\ngoal: {q: [1, 2]}\n");
  });
  CHECK(goal.field().find("goal") == 0);
  CHECK(goal.line() == 3);
  CHECK(config_error([] { parse_problem_config(kBase + "limits: {margin_fraction: 0.7}\n"); }).line() == 6);
}

TEST_CASE("q_c accepts a scalar, a diagonal or a matrix") {
  CHECK(parse_problem_config(kBase + "q_c: 2.0\n").problem.gp.Qc.isApprox(2.0 * Eigen::MatrixXd::Identity(3, 3)));
  const Eigen::MatrixXd d = parse_problem_config(kBase + "q_c: [1, 2, 3]\n").problem.gp.Qc;
  CHECK(d(1, 1) == 2.0);
  CHECK(d(0, 1) == 0.0);
  const Eigen::MatrixXd m = parse_problem_config(kBase + "q_c: [[2, 0.1, 0], [0.1, 2, 0], [0, 0, 1]]\n").problem.gp.Qc;
  CHECK(m(0, 1) == 0.1);
  CHECK_THROWS_AS(parse_problem_config(kBase + "q_c: [[1, 0], [0, 1]]\n"), ConfigError);
}

TEST_CASE("inline scenes build an SDF") {
  const ProblemConfig c = parse_problem_config(kBase +
      "scene:\n"
      "  epsilon: 0.05\n"
      "  grid: {origin: [-1, -1, -1], cell_size: 0.1, dims: [21, 21, 21]}\n"
      "  spheres: [{center: [0.5, 0, 0.5], radius: 0.2}]\n");
  REQUIRE(c.problem.scene.has_value());
  CHECK(c.problem.scene->epsilon == 0.05);
  CHECK(c.problem.scene->sdf->query(Eigen::Vector3d(0.5, 0, 0.5)).distance < 0.0);
}

TEST_CASE("bundled files load") {
  const std::filesystem::path data(KDFG_TEST_DATA_DIR);
  for (const char* cfg : {"acrobot_swingup.cfg", "arm3_task.cfg", "arm3_desk.cfg", "arm3_hold.cfg"}) {
    CAPTURE(cfg);
    CHECK_NOTHROW(load_problem_config(data / "configs" / cfg).problem.validate());
  }
  const Scene desk = load_scene_file(data / "scenes/desk.yaml");
  CHECK(desk.obstacles.boxes.size() == 1);
  for (const char* suite : {"arm3_min_torque_on.yaml", "arm3_min_torque_off.yaml", "arm3_replan.yaml"}) {
    CAPTURE(suite);
    CHECK_NOTHROW(load_suite_file(data / "suites" / suite));
  }
  CHECK(load_suite_file(data / "suites/arm3_min_torque_on.yaml").base.problem.toggles.min_torque);
  CHECK_FALSE(load_suite_file(data / "suites/arm3_min_torque_off.yaml").base.problem.toggles.min_torque);
  CHECK(load_suite_file(data / "suites/arm3_replan.yaml").mode == SuiteMode::kReplan);
}

TEST_CASE("malformed models are rejected") {
  const std::string good = R"(robot:
  name: one
  joints:
    - axis: [0, 0, 1, 0, 0, 0]
      limits: {q_min: -1, q_max: 1, vel_max: 1, acc_max: 1, torque_max: 1}
  links:
    - mass: 1.0
      inertia: [0.1, 0, 0,  0, 0.1, 0,  0, 0, 0.1]
      com: [0, 0, 0.5]
)";
  CHECK(parse_model(good).numJoints() == 1);
  auto broken = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  const auto limits = config_error([&] { parse_model(broken("q_min: -1", "q_min: 2")); });
  CHECK(limits.field() == "robot.joints[0].limits.q_min");
  CHECK(limits.line() == 5);
  CHECK_THROWS_AS(parse_model(broken("mass: 1.0", "mass: -1.0")), ConfigError);
  CHECK_THROWS_AS(parse_model(broken("axis: [0, 0, 1", "axis: [0, 0, 0")), ConfigError);
  CHECK_THROWS_AS(parse_model(broken("inertia: [0.1", "inertia: [-0.1")), ConfigError);
}

TEST_CASE("scene deltas replace or move obstacles") {
  ObstacleSet cur;
  cur.boxes.push_back({Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.2, 0.2, 0.2)});
  const ObstacleSet moved = apply_scene_delta("offset: [0, 0, 0.5]\n", cur);
  REQUIRE(moved.boxes.size() == 1);
  CHECK(moved.boxes[0].center.isApprox(Eigen::Vector3d(1, 0, 0.5)));
  const ObstacleSet replaced = apply_scene_delta("spheres: [{center: [0, 1, 0], radius: 0.3}]\noffset: [1, 0, 0]\n", cur);
  CHECK(replaced.boxes.empty());
  REQUIRE(replaced.spheres.size() == 1);
  CHECK(replaced.spheres[0].center.isApprox(Eigen::Vector3d(1, 1, 0)));
  CHECK_THROWS_AS(apply_scene_delta("offset: [0, 0]\n", cur), ConfigError);
  CHECK_THROWS_AS(apply_scene_delta("shift: [0, 0, 1]\n", cur), ConfigError);
}

TEST_CASE("joint vectors parse from the command line") {
  CHECK(parse_joint_vector("0.1,0.2,0.3", 3, "goal").isApprox(Eigen::Vector3d(0.1, 0.2, 0.3)));
  CHECK(parse_joint_vector("1 2", 2, "goal").isApprox(Eigen::Vector2d(1, 2)));
  CHECK_THROWS_AS(parse_joint_vector("1,2", 3, "goal"), ConfigError);
  CHECK_THROWS_AS(parse_joint_vector("1,x,3", 3, "goal"), ConfigError);
}

TEST_CASE("trajectories round trip through CSV and JSON") {
  PlanningProblem p = parse_problem_config(kBase).problem;
  const Trajectory t = values_to_trajectory(initialize_trajectory(p), 3, p.steps, p.dt());
  std::stringstream csv;
  write_trajectory_csv(t, csv);
  const Trajectory back = read_trajectory_csv(csv);
  REQUIRE(back.points.size() == t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    CHECK(back.points[i].t == t.points[i].t);
    CHECK(back.points[i].q == t.points[i].q);
    CHECK(back.points[i].torque == t.points[i].torque);
  }
  const Trajectory fromj = trajectory_from_json(to_json(t));
  CHECK(fromj.points.back().qdd == t.points.back().qdd);
  CHECK(fromj.points[3].wrenches.size() == 3);
}

TEST_CASE("malformed CSV reports the line") {
  std::stringstream empty;
  CHECK(config_error([&] { read_trajectory_csv(empty); }).line() == 1);
  std::stringstream header("t,q_0,dq_0\n");
  CHECK(config_error([&] { read_trajectory_csv(header); }).line() == 1);
  std::stringstream cell("t,q_0,dq_0,ddq_0,tau_0\n0,0,0,0,0\n0.1,0,zz,0,0\n");
  CHECK(config_error([&] { read_trajectory_csv(cell); }).line() == 3);
  std::stringstream width("t,q_0,dq_0,ddq_0,tau_0\n0,0,0,0\n");
  CHECK(config_error([&] { read_trajectory_csv(width); }).line() == 2);
}

}  // TEST_SUITE
