#pragma once

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <map>
#include <set>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kdfg/gp_prior.hpp"
#include "kdfg/incremental.hpp"
#include "kdfg/levenberg_marquardt.hpp"
#include "kdfg/planning_factors.hpp"
#include "kdfg/robot_model.hpp"
#include "kdfg/sdf.hpp"

namespace kdfg {

struct JointState {
  Eigen::VectorXd q, qd, qdd;
  static JointState AtRest(const Eigen::VectorXd& q);
};

enum class GoalMode { kFullState, kPositionOnly };

struct Sigmas {
  double start_goal = 1e-4;
  double dynamics = 1e-3;
  double obstacle = 0.05;
  double limits = 1e-2;
  double min_torque = 1.0;
  double unactuated = 1e-4;
  double pose = 1e-4;
};

struct FactorToggles {
  bool obstacles = true;
  bool limits = true;
  bool min_torque = false;
};

struct Scene {
  ObstacleSet obstacles;
  GridSpec grid;
  SdfPtr sdf;  // built from obstacles/grid, or loaded from a file
  double epsilon = 0.1;
};

/// Scene with its SDF built analytically from the obstacles.
Scene make_scene(ObstacleSet obstacles, const GridSpec& grid, double epsilon);

struct SuccessTolerances {
  double tol_eq = 1e-4;        // whitened equality residual (inf-norm)
  double limit_slack = 0.0;    // allowed excursion past a hard limit
  double min_clearance = 0.0;  // sphere clearance from obstacles
};

struct PlanningProblem {
  ModelPtr model;
  JointState start;
  std::variant<JointState, Pose> goal;
  GoalMode goal_mode = GoalMode::kFullState;
  double horizon = 10.0;
  int steps = 100;
  std::optional<Scene> scene;
  FactorToggles toggles;
  Sigmas sigmas;
  GpPriorSpec gp;  // Qc defaults to identity when empty
  double hinge_gain = 10.0;
  double margin_fraction = 0.05;
  LMParams lm;
  double relinearize_threshold = 0.01;
  int max_replan_updates = 50;
  SuccessTolerances success;
  /// After the solve, pull the estimate onto the equality factors (dynamics,
  /// unactuated, start, goal) with a short least-squares solve over those factors only.
  bool project_equalities = true;
  int projection_iterations = 20;

  double dt() const { return horizon / steps; }
  /// Throws ConfigError when the problem is inconsistent.
  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  Eigen::VectorXd q, qd, qdd, torque;
  std::vector<Twist<double>> twists, accelerations;
  std::vector<Wrench<double>> wrenches;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  int joints() const { return points.empty() ? 0 : static_cast<int>(points.front().q.size()); }
};

Trajectory values_to_trajectory(const Values& values, int joints, int steps, double dt);
Values trajectory_to_values(const Trajectory& traj);

/// Factor graph of one planning problem plus bookkeeping for later swaps.
struct PlanningGraph {
  FactorGraph graph;
  std::vector<FactorId> goal_factors;
  std::vector<FactorId> start_factors;
  std::map<std::pair<int, int>, std::vector<FactorId>> obstacle_factors;  // (step, global sphere) -> ids
  std::vector<FactorId> equality_factors;  // dynamics, unactuated, start, goal
  std::vector<FactorId> limit_factors;
  std::map<std::string, std::size_t> factor_counts;  // by kind
  std::size_t variable_count = 0;
  std::size_t variable_dim = 0;
};

/// Keys of one time step, in the same order for every step.
std::vector<Key> step_keys(int joints, int step);

PlanningGraph build_graph(const PlanningProblem& problem);

/// Goal factors for a problem (priors on the last step or a pose factor).
std::vector<FactorPtr> make_goal_factors(const PlanningProblem& problem);

/// Obstacle factors of every sphere at `step`, in (link, sphere) order.
std::vector<FactorPtr> make_obstacle_factors(const PlanningProblem& problem, const SdfPtr& sdf, int step);

/// Quintic rest-to-rest interpolation from start to goal with every link
/// quantity filled in by the Newton-Euler oracle.
Values initialize_trajectory(const PlanningProblem& problem);

/// Quintic blend s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5 and its first two derivatives.
std::array<double, 3> quintic_blend(double tau);

struct SuccessReport {
  bool success = false;
  double max_equality_residual = 0.0;  // whitened
  double max_limit_violation = 0.0;
  double min_clearance = kNoObstacleDistance;
};

SuccessReport assess(const PlanningProblem& problem, const PlanningGraph& pg, const Values& values);

struct PlanResult {
  Trajectory trajectory;
  Values values;
  SolveStats stats;
  SuccessReport report;
  int projection_iterations = 0;
  double projection_shift = 0.0;  // max |change| of any variable during projection
};

struct Projection {
  Values values;
  int iterations = 0;
  double shift = 0.0;
};

/// Nearest point (in the damped Gauss-Newton sense) that satisfies the equality
/// factors of `pg`; the objective factors are ignored.
Projection project_onto_equalities(const PlanningGraph& pg, const Values& values, int max_iterations);

PlanResult plan_batch(const PlanningProblem& problem);
/// Batch solve from a given initial guess (warm start).
PlanResult plan_batch_from(const PlanningProblem& problem, const Values& init);

/// Incremental replanning session.
class ReplanSession {
 public:
  const PlanningProblem& problem() const { return problem_; }
  const PlanResult& current() const { return current_; }
  const IncrementalSolver& solver() const { return *solver_; }
  const PlanningGraph& planningGraph() const { return pg_; }

  PlanResult replanGoal(const std::variant<JointState, Pose>& goal);
  PlanResult replanScene(const ObstacleSet& obstacles);

 private:
  friend ReplanSession open_session(const PlanningProblem& problem);
  ReplanSession() = default;
  struct UpdateLog {
    std::set<Key> reeliminated;
    int updates = 0;
  };
  IncrementalSolver::UpdateResult apply(const std::vector<FactorId>& removed, const std::vector<FactorPtr>& added,
                                        const std::set<Key>& relin, UpdateLog& log);
  void relinearize(UpdateLog& log);
  PlanResult finish(const UpdateLog& log, double initial_error, std::chrono::steady_clock::time_point t0);

  PlanningProblem problem_;
  PlanningGraph pg_;
  std::unique_ptr<IncrementalSolver> solver_;
  PlanResult current_;
};

ReplanSession open_session(const PlanningProblem& problem);

struct LimitViolation {
  int step = 0;
  int joint = 0;
  std::string quantity;  // q, dq, ddq, tau
  double amount = 0.0;
};

struct ValidationTolerances {
  double dynamics = 1e-3;
  double limit_slack = 0.0;
  double min_clearance = 0.0;
  double goal = 1e-3;
};

struct ValidationReport {
  double max_dynamics_defect = 0.0;
  int worst_dynamics_step = -1;
  double max_limit_violation = 0.0;
  std::vector<LimitViolation> violations;
  double min_clearance = kNoObstacleDistance;
  double goal_error = 0.0;
  double max_gp_defect = 0.0;
  bool passed = false;
};

/// Independent check against the Newton-Euler oracle, joint limits and the scene.
ValidationReport validate_trajectory(const Trajectory& traj, const RobotModel& model, const Scene* scene,
                                     const std::optional<std::variant<JointState, Pose>>& goal,
                                     const ValidationTolerances& tol = {});

/// Sum over steps and joints of |tau|.
double total_abs_torque(const Trajectory& traj);

}  // namespace kdfg
