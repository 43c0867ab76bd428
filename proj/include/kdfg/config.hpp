#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "kdfg/planner.hpp"

namespace kdfg {

/// Scene document:
///
///   epsilon: 0.1
///   grid: {origin: [3], cell_size: 0.02, dims: [3]}
///   boxes:   [{center: [3], extents: [3]}]     # full side lengths
///   spheres: [{center: [3], radius: r}]
///   sdf_file: path                             # optional, replaces the analytic build
///
/// Relative paths resolve against `base_dir`.
Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir = {},
                  const std::string& source = "scene");
Scene load_scene_file(const std::filesystem::path& path);

/// Obstacle list in the scene format (only `boxes`, `spheres` and `offset` are read),
/// used for scene deltas. `offset: [3]` translates every obstacle.
ObstacleSet parse_obstacles(const std::string& text, const std::string& source = "obstacles");

/// Scene delta: `boxes`/`spheres` replace the current obstacles, `offset` then
/// translates the result. An offset alone moves the current obstacles.
ObstacleSet apply_scene_delta(const std::string& text, const ObstacleSet& current,
                              const std::string& source = "scene delta");

struct OutputSpec {
  std::filesystem::path trajectory_csv;
  std::filesystem::path trajectory_json;
  std::filesystem::path stats_json;
  std::filesystem::path plot_data;
};

struct ProblemConfig {
  PlanningProblem problem;
  OutputSpec output;
  std::filesystem::path source;
};

/// Problem document (unknown keys are rejected):
///
///   model: arm3 | path/to/model.yaml
///   start: {q: [...], qd: [...], qdd: [...]}       # qd, qdd default to zero
///   goal:  {q: [...]} | {pose: {rotation: [9], translation: [3]}}
///   goal_mode: full | position
///   horizon: 10
///   steps: 100
///   scene: path | {inline scene document}
///   factors: {obstacles, limits, min_torque}
///   sigmas: {start_goal, dynamics, obstacle, limits, min_torque, unactuated, pose}
///   q_c: 1.0 | [diagonal] | [[row], ...]
///   gp: {order: constant_acceleration | constant_velocity, standard_coefficient: false}
///   limits: {hinge_gain, margin_fraction}
///   solver: {max_iterations, lambda_initial, lambda_factor, lambda_max, relative_tolerance,
///            absolute_tolerance, ordering: forward | mindegree, damping: identity | diagonal,
///            second_order_correction, project_equalities, projection_iterations}
///   replan: {relinearize_threshold, max_updates}
///   success: {tol_eq, limit_slack, min_clearance}
///   output: {trajectory_csv, trajectory_json, stats_json, plot_data}
ProblemConfig parse_problem_config(const std::string& text, const std::filesystem::path& base_dir = {},
                                   const std::string& source = "config");
ProblemConfig load_problem_config(const std::filesystem::path& path);

/// Parse a joint vector given on the command line ("0.1,0.2,0.3" or "0.1 0.2 0.3").
Eigen::VectorXd parse_joint_vector(const std::string& text, int expected, const std::string& field);

enum class SuiteMode { kPlan, kReplan };

/// Benchmark suite document:
///
///   config: path/to/task.cfg       # base problem
///   mode: plan | replan
///   trials: 20
///   seed: 1
///   goal_margin: 0.1               # goals drawn uniformly in limits shrunk by this fraction
///   perturbation: 0.2              # replan: new goal = goal + U(-p, p) per joint
///   factors: {...}                 # optional overrides of the base config toggles
struct BenchmarkSuite {
  ProblemConfig base;
  SuiteMode mode = SuiteMode::kPlan;
  int trials = 20;
  std::uint64_t seed = 1;
  double goal_margin = 0.1;
  double perturbation = 0.2;
  std::filesystem::path source;
};

BenchmarkSuite parse_suite(const std::string& text, const std::filesystem::path& base_dir = {},
                           const std::string& source = "suite");
BenchmarkSuite load_suite_file(const std::filesystem::path& path);

/// Resolve a bundled-model name or a model file path.
ModelPtr resolve_model(const std::string& ref, const std::filesystem::path& base_dir);

}  // namespace kdfg
