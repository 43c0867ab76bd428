#include "kdfg/planner.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "kdfg/dynamics.hpp"
#include "kdfg/errors.hpp"
#include "kdfg/ordering.hpp"

namespace kdfg {

namespace {

std::uint32_t u(int i) { return static_cast<std::uint32_t>(i); }

Eigen::MatrixXd qc_of(const PlanningProblem& p) {
  const int n = p.model->numJoints();
  return p.gp.Qc.size() == 0 ? Eigen::MatrixXd::Identity(n, n) : p.gp.Qc;
}

GpPriorSpec gp_spec(const PlanningProblem& p) {
  GpPriorSpec spec = p.gp;
  spec.Qc = qc_of(p);
  return spec;
}

struct Bound {
  char symbol;
  const char* quantity;
  double lo, hi;
};

std::array<Bound, 4> bounds_of(const JointLimits& l) {
  return {{{sym::kJointAngle, "q", l.q_min, l.q_max},
           {sym::kJointVel, "dq", -l.vel_max, l.vel_max},
           {sym::kJointAccel, "ddq", -l.acc_max, l.acc_max},
           {sym::kTorque, "tau", -l.torque_max, l.torque_max}}};
}

void check_state(const JointState& s, int n, const std::string& field) {
  if (s.q.size() != n) throw ConfigError(field + ".q", 0, "expected " + std::to_string(n) + " values");
  if (s.qd.size() != n) throw ConfigError(field + ".dq", 0, "expected " + std::to_string(n) + " values");
  if (s.qdd.size() != n) throw ConfigError(field + ".ddq", 0, "expected " + std::to_string(n) + " values");
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

JointState JointState::AtRest(const Eigen::VectorXd& q) {
  return {q, Eigen::VectorXd::Zero(q.size()), Eigen::VectorXd::Zero(q.size())};
}

Scene make_scene(ObstacleSet obstacles, const GridSpec& grid, double epsilon) {
  Scene s;
  s.sdf = std::make_shared<const SdfGrid>(build_sdf(obstacles, grid));
  s.obstacles = std::move(obstacles);
  s.grid = grid;
  s.epsilon = epsilon;
  return s;
}

void PlanningProblem::validate() const {
  if (!model) throw ConfigError("model", 0, "no robot model");
  const int n = model->numJoints();
  if (steps < 2) throw ConfigError("steps", 0, "need at least 2 steps");
  if (!(horizon > 0)) throw ConfigError("horizon", 0, "must be positive");
  check_state(start, n, "start");
  for (int j = 0; j < n; ++j) {
    const auto& l = model->joint(j).limits;
    if (start.q(j) < l.q_min || start.q(j) > l.q_max) {
      throw ConfigError("start.q", 0, "joint " + std::to_string(j) + " outside its limits");
    }
  }
  if (const auto* g = std::get_if<JointState>(&goal)) check_state(*g, n, "goal");
  const Eigen::MatrixXd Qc = qc_of(*this);
  if (Qc.rows() != n || Qc.cols() != n) throw ConfigError("q_c", 0, "must be " + std::to_string(n) + "x" + std::to_string(n));
  Eigen::LLT<Eigen::MatrixXd> llt(Qc);
  if (llt.info() != Eigen::Success || (Qc - Qc.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("q_c", 0, "must be symmetric positive definite");
  }
  for (double s : {sigmas.start_goal, sigmas.dynamics, sigmas.obstacle, sigmas.limits, sigmas.min_torque,
                   sigmas.unactuated, sigmas.pose}) {
    if (!(s > 0)) throw ConfigError("sigmas", 0, "all sigmas must be positive");
  }
  if (!(margin_fraction >= 0 && margin_fraction < 0.5)) throw ConfigError("limits.margin_fraction", 0, "must be in [0, 0.5)");
  if (!(hinge_gain > 0)) throw ConfigError("limits.hinge_gain", 0, "must be positive");
  if (toggles.obstacles && scene && !scene->sdf) throw ConfigError("scene", 0, "scene has no distance field");
}

std::vector<Key> step_keys(int joints, int step) {
  std::vector<Key> keys;
  for (int j = 0; j < joints; ++j) {
    const auto t = u(step);
    keys.insert(keys.end(), {Q(u(j), t), DQ(u(j), t), DDQ(u(j), t), TwistKey(u(j), t), TwistAccelKey(u(j), t),
                             WrenchKey(u(j), t), TorqueKey(u(j), t)});
  }
  return keys;
}

std::vector<FactorPtr> make_goal_factors(const PlanningProblem& p) {
  const int n = p.model->numJoints();
  const int N = p.steps;
  const auto noise = NoiseModel::Isotropic(1, p.sigmas.start_goal);
  std::vector<FactorPtr> out;
  const bool full = p.goal_mode == GoalMode::kFullState;
  if (const auto* g = std::get_if<JointState>(&p.goal)) {
    for (int j = 0; j < n; ++j) {
      out.push_back(std::make_shared<PriorFactor>(Q(u(j), u(N)), Eigen::VectorXd::Constant(1, g->q(j)), noise));
      if (full) {
        out.push_back(std::make_shared<PriorFactor>(DQ(u(j), u(N)), Eigen::VectorXd::Constant(1, g->qd(j)), noise));
        out.push_back(std::make_shared<PriorFactor>(DDQ(u(j), u(N)), Eigen::VectorXd::Constant(1, g->qdd(j)), noise));
      }
    }
  } else {
    out.push_back(std::make_shared<PoseFactor>(p.model, N, std::get<Pose>(p.goal), NoiseModel::Isotropic(6, p.sigmas.pose)));
    if (full) {
      for (int j = 0; j < n; ++j) {
        out.push_back(std::make_shared<PriorFactor>(DQ(u(j), u(N)), Eigen::VectorXd::Zero(1), noise));
        out.push_back(std::make_shared<PriorFactor>(DDQ(u(j), u(N)), Eigen::VectorXd::Zero(1), noise));
      }
    }
  }
  return out;
}

std::vector<FactorPtr> make_obstacle_factors(const PlanningProblem& p, const SdfPtr& sdf, int step) {
  std::vector<FactorPtr> out;
  const double eps = p.scene ? p.scene->epsilon : 0.1;
  for (int j = 0; j < p.model->numJoints(); ++j) {
    for (int s = 0; s < static_cast<int>(p.model->link(j).spheres.size()); ++s) {
      out.push_back(std::make_shared<ObstacleFactor>(p.model, sdf, j, s, step, eps,
                                                     NoiseModel::Isotropic(1, p.sigmas.obstacle)));
    }
  }
  return out;
}

PlanningGraph build_graph(const PlanningProblem& p) {
  p.validate();
  const ModelPtr& model = p.model;
  const int n = model->numJoints();
  const int N = p.steps;
  PlanningGraph pg;
  auto add = [&](FactorPtr f) {
    ++pg.factor_counts[f->kind()];
    return pg.graph.add(std::move(f));
  };
  const auto dyn6 = NoiseModel::Isotropic(6, p.sigmas.dynamics);
  const auto dyn1 = NoiseModel::Isotropic(1, p.sigmas.dynamics);
  const GpPriorSpec gp = gp_spec(p);
  const bool obstacles = p.toggles.obstacles && p.scene && p.scene->sdf && model->numSpheres() > 0;

  for (int t = 0; t <= N; ++t) {
    for (int j = 0; j < n; ++j) {
      pg.equality_factors.push_back(add(std::make_shared<TwistFactor>(model, j, t, dyn6)));
      pg.equality_factors.push_back(add(std::make_shared<AccelFactor>(model, j, t, dyn6)));
      pg.equality_factors.push_back(add(std::make_shared<WrenchFactor>(model, j, t, dyn6)));
      pg.equality_factors.push_back(add(std::make_shared<TorqueFactor>(model, j, t, dyn1)));
      if (!model->joint(j).actuated) {
        pg.equality_factors.push_back(add(std::make_shared<PriorFactor>(
            TorqueKey(u(j), u(t)), Eigen::VectorXd::Zero(1), NoiseModel::Isotropic(1, p.sigmas.unactuated))));
      }
    }
    if (p.toggles.limits) {
      for (int j = 0; j < n; ++j) {
        for (const Bound& b : bounds_of(model->joint(j).limits)) {
          const double eps = p.margin_fraction * (b.hi - b.lo);
          pg.limit_factors.push_back(add(std::make_shared<LimitFactor>(Key{b.symbol, u(j), u(t)}, b.lo, b.hi, eps,
                                                                       p.hinge_gain,
                                                                       NoiseModel::Isotropic(1, p.sigmas.limits))));
        }
      }
    }
    if (obstacles) {
      int global = 0;
      for (auto& f : make_obstacle_factors(p, p.scene->sdf, t)) pg.obstacle_factors[{t, global++}].push_back(add(f));
    }
    if (p.toggles.min_torque) add(std::make_shared<MinTorqueFactor>(n, t, NoiseModel::Isotropic(n, p.sigmas.min_torque)));
    if (t > 0) add(std::make_shared<GpPriorFactor>(n, t - 1, p.dt(), gp));
  }

  const auto prior = NoiseModel::Isotropic(1, p.sigmas.start_goal);
  for (int j = 0; j < n; ++j) {
    for (auto [k, v] : {std::pair{Q(u(j), 0), p.start.q(j)}, std::pair{DQ(u(j), 0), p.start.qd(j)},
                        std::pair{DDQ(u(j), 0), p.start.qdd(j)}}) {
      const FactorId id = add(std::make_shared<PriorFactor>(k, Eigen::VectorXd::Constant(1, v), prior));
      pg.start_factors.push_back(id);
      pg.equality_factors.push_back(id);
    }
  }
  for (auto& f : make_goal_factors(p)) {
    const FactorId id = add(f);
    pg.goal_factors.push_back(id);
    pg.equality_factors.push_back(id);
  }
  pg.variable_count = static_cast<std::size_t>(N + 1) * 7 * n;
  pg.variable_dim = static_cast<std::size_t>(N + 1) * (4 + 3 * 6) * n;
  return pg;
}

std::array<double, 3> quintic_blend(double tau) {
  const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
  return {10 * t3 - 15 * t4 + 6 * t5, 30 * t2 - 60 * t3 + 30 * t4, 60 * tau - 180 * t2 + 120 * t3};
}

namespace {

void insert_step(Values& values, const RobotModel& model, int t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                 const Eigen::VectorXd& qdd) {
  const RneaResult r = rnea(model, q, qd, qdd);
  for (int j = 0; j < model.numJoints(); ++j) {
    values.insert(Q(u(j), u(t)), q(j));
    values.insert(DQ(u(j), u(t)), qd(j));
    values.insert(DDQ(u(j), u(t)), qdd(j));
    values.insert(TwistKey(u(j), u(t)), Eigen::VectorXd(r.twists[j]));
    values.insert(TwistAccelKey(u(j), u(t)), Eigen::VectorXd(r.accelerations[j]));
    values.insert(WrenchKey(u(j), u(t)), Eigen::VectorXd(r.wrenches[j]));
    values.insert(TorqueKey(u(j), u(t)), r.torques(j));
  }
}

}  // namespace

Values initialize_trajectory(const PlanningProblem& p) {
  p.validate();
  const RobotModel& model = *p.model;
  const Eigen::VectorXd qs = p.start.q;
  const Eigen::VectorXd qg = std::holds_alternative<JointState>(p.goal) ? std::get<JointState>(p.goal).q : qs;
  const Eigen::VectorXd dq = qg - qs;
  const double T = p.horizon;
  Values values;
  for (int t = 0; t <= p.steps; ++t) {
    const double tau = static_cast<double>(t) / p.steps;
    const auto s = quintic_blend(tau);
    insert_step(values, model, t, qs + dq * s[0], dq * (s[1] / T), dq * (s[2] / (T * T)));
  }
  return values;
}

Trajectory values_to_trajectory(const Values& values, int n, int steps, double dt) {
  Trajectory traj;
  for (int t = 0; t <= steps; ++t) {
    TrajectoryPoint pt;
    pt.t = t * dt;
    pt.q.resize(n);
    pt.qd.resize(n);
    pt.qdd.resize(n);
    pt.torque.resize(n);
    for (int j = 0; j < n; ++j) {
      pt.q(j) = values.scalar(Q(u(j), u(t)));
      pt.qd(j) = values.scalar(DQ(u(j), u(t)));
      pt.qdd(j) = values.scalar(DDQ(u(j), u(t)));
      pt.torque(j) = values.scalar(TorqueKey(u(j), u(t)));
      pt.twists.push_back(values.at(TwistKey(u(j), u(t))));
      pt.accelerations.push_back(values.at(TwistAccelKey(u(j), u(t))));
      pt.wrenches.push_back(values.at(WrenchKey(u(j), u(t))));
    }
    traj.points.push_back(std::move(pt));
  }
  return traj;
}

Values trajectory_to_values(const Trajectory& traj) {
  Values values;
  for (int t = 0; t < static_cast<int>(traj.points.size()); ++t) {
    const auto& pt = traj.points[t];
    for (int j = 0; j < static_cast<int>(pt.q.size()); ++j) {
      values.insert(Q(u(j), u(t)), pt.q(j));
      values.insert(DQ(u(j), u(t)), pt.qd(j));
      values.insert(DDQ(u(j), u(t)), pt.qdd(j));
      values.insert(TorqueKey(u(j), u(t)), pt.torque(j));
      if (j < static_cast<int>(pt.twists.size())) values.insert(TwistKey(u(j), u(t)), Eigen::VectorXd(pt.twists[j]));
      if (j < static_cast<int>(pt.accelerations.size())) {
        values.insert(TwistAccelKey(u(j), u(t)), Eigen::VectorXd(pt.accelerations[j]));
      }
      if (j < static_cast<int>(pt.wrenches.size())) values.insert(WrenchKey(u(j), u(t)), Eigen::VectorXd(pt.wrenches[j]));
    }
  }
  return values;
}

SuccessReport assess(const PlanningProblem& p, const PlanningGraph& pg, const Values& values) {
  SuccessReport r;
  for (FactorId id : pg.equality_factors) {
    if (!pg.graph.contains(id)) continue;
    r.max_equality_residual = std::max(r.max_equality_residual, max_abs(pg.graph.at(id)->whitenedResidual(values)));
  }
  const int n = p.model->numJoints();
  if (p.toggles.limits) {
    for (int t = 0; t <= p.steps; ++t) {
      for (int j = 0; j < n; ++j) {
        for (const Bound& b : bounds_of(p.model->joint(j).limits)) {
          const double z = values.scalar(Key{b.symbol, u(j), u(t)});
          r.max_limit_violation = std::max({r.max_limit_violation, b.lo - z, z - b.hi});
        }
      }
    }
  }
  if (p.toggles.obstacles && p.scene && p.scene->sdf) {
    for (int t = 0; t <= p.steps; ++t) {
      Eigen::VectorXd q(n);
      for (int j = 0; j < n; ++j) q(j) = values.scalar(Q(u(j), u(t)));
      for (const auto& s : sphere_placements(*p.model, q)) {
        r.min_clearance = std::min(r.min_clearance, p.scene->sdf->query(s.center).distance - s.radius);
      }
    }
  }
  r.success = r.max_equality_residual < p.success.tol_eq && r.max_limit_violation <= p.success.limit_slack &&
              r.min_clearance >= p.success.min_clearance;
  return r;
}

Projection project_onto_equalities(const PlanningGraph& pg, const Values& values, int max_iterations) {
  FactorGraph eq;
  for (FactorId id : pg.equality_factors) {
    if (pg.graph.contains(id)) eq.add(pg.graph.at(id));
  }
  LMParams lp;
  lp.max_iterations = max_iterations;
  lp.relative_tolerance = 1e-12;
  lp.absolute_tolerance = 1e-24;
  lp.second_order_correction = false;
  auto [x, stats] = optimize_lm(eq, values, lp);
  Projection out;
  out.shift = x.maxAbsDiff(values);
  out.values = std::move(x);
  out.iterations = stats.iterations;
  return out;
}

PlanResult plan_batch_from(const PlanningProblem& p, const Values& init) {
  const auto t0 = std::chrono::steady_clock::now();
  const PlanningGraph pg = build_graph(p);
  auto [values, stats] = optimize_lm(pg.graph, init, p.lm);
  PlanResult res;
  if (p.project_equalities) {
    Projection proj = project_onto_equalities(pg, values, p.projection_iterations);
    values = std::move(proj.values);
    res.projection_iterations = proj.iterations;
    res.projection_shift = proj.shift;
    stats.final_error = pg.graph.error(values);
  }
  res.trajectory = values_to_trajectory(values, p.model->numJoints(), p.steps, p.dt());
  res.report = assess(p, pg, values);
  res.values = std::move(values);
  res.stats = std::move(stats);
  res.stats.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

PlanResult plan_batch(const PlanningProblem& p) { return plan_batch_from(p, initialize_trajectory(p)); }

ReplanSession open_session(const PlanningProblem& problem) {
  ReplanSession s;
  s.problem_ = problem;
  s.pg_ = build_graph(problem);
  s.current_ = plan_batch(problem);
  const auto t0 = std::chrono::steady_clock::now();
  s.solver_ = std::make_unique<IncrementalSolver>(s.pg_.graph, s.current_.values,
                                                  make_ordering(s.pg_.graph, problem.lm.ordering));
  // Report the tree's estimate, as every later replan does, so that an update
  // that changes nothing reproduces this result.
  PlanResult& cur = s.current_;
  cur.values = s.solver_->estimate();
  if (problem.project_equalities) {
    Projection proj = project_onto_equalities(s.pg_, cur.values, problem.projection_iterations);
    cur.values = std::move(proj.values);
    cur.projection_iterations += proj.iterations;
    cur.projection_shift = std::max(cur.projection_shift, proj.shift);
  }
  cur.trajectory = values_to_trajectory(cur.values, problem.model->numJoints(), problem.steps, problem.dt());
  cur.report = assess(problem, s.pg_, cur.values);
  cur.stats.final_error = s.pg_.graph.error(cur.values);
  cur.stats.wall_time_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

IncrementalSolver::UpdateResult ReplanSession::apply(const std::vector<FactorId>& removed,
                                                     const std::vector<FactorPtr>& added, const std::set<Key>& relin,
                                                     UpdateLog& log) {
  auto r = solver_->update(removed, added, relin);
  log.reeliminated.insert(r.reeliminated.begin(), r.reeliminated.end());
  ++log.updates;
  pg_.graph = solver_->graph();
  return r;
}

void ReplanSession::relinearize(UpdateLog& log) {
  for (int it = 0; it < problem_.max_replan_updates; ++it) {
    const std::set<Key> keys = solver_->keysAboveThreshold(problem_.relinearize_threshold);
    if (keys.empty()) break;
    apply({}, {}, keys, log);
  }
}

PlanResult ReplanSession::finish(const UpdateLog& log, double initial_error,
                                 std::chrono::steady_clock::time_point t0) {
  PlanResult res;
  res.values = solver_->estimate();
  if (problem_.project_equalities) {
    Projection proj = project_onto_equalities(pg_, res.values, problem_.projection_iterations);
    res.values = std::move(proj.values);
    res.projection_iterations = proj.iterations;
    res.projection_shift = proj.shift;
  }
  res.trajectory = values_to_trajectory(res.values, problem_.model->numJoints(), problem_.steps, problem_.dt());
  res.report = assess(problem_, pg_, res.values);
  res.stats.iterations = log.updates;
  res.stats.accepted_steps = log.updates;
  res.stats.initial_error = initial_error;
  res.stats.final_error = pg_.graph.error(res.values);
  res.stats.reeliminated_keys = log.reeliminated.size();
  res.stats.total_keys = solver_->linearizationPoint().size();
  res.stats.status = SolveStatus::kConverged;
  res.stats.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  current_ = res;
  return res;
}

PlanResult ReplanSession::replanGoal(const std::variant<JointState, Pose>& goal) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanningProblem next = problem_;
  next.goal = goal;
  next.validate();
  problem_ = std::move(next);

  const std::vector<FactorId> old_goal = pg_.goal_factors;
  UpdateLog log;
  const auto r = apply(old_goal, make_goal_factors(problem_), {}, log);
  std::erase_if(pg_.equality_factors, [&](FactorId id) {
    return std::find(old_goal.begin(), old_goal.end(), id) != old_goal.end();
  });
  pg_.goal_factors = r.added_ids;
  pg_.equality_factors.insert(pg_.equality_factors.end(), r.added_ids.begin(), r.added_ids.end());
  const double initial_error = pg_.graph.error(current_.values);
  relinearize(log);
  return finish(log, initial_error, t0);
}

PlanResult ReplanSession::replanScene(const ObstacleSet& obstacles) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!problem_.scene) throw ConfigError("scene", 0, "problem has no scene to update");
  Scene scene = make_scene(obstacles, problem_.scene->grid, problem_.scene->epsilon);
  problem_.scene = scene;
  const double initial_error = [&] {
    // Error of the previous solution under the new scene.
    PlanningGraph fresh = build_graph(problem_);
    return fresh.graph.error(current_.values);
  }();

  UpdateLog log;
  for (int round = 0; round < problem_.max_replan_updates; ++round) {
    const Values est = solver_->estimate();
    std::vector<FactorId> removed;
    std::vector<FactorPtr> added;
    std::vector<std::pair<int, int>> slots;
    for (auto& [slot, ids] : pg_.obstacle_factors) {
      const FactorId id = ids.back();
      const auto* old = dynamic_cast<const ObstacleFactor*>(pg_.graph.at(id).get());
      if (old->sdf() == scene.sdf) continue;
      auto repl = std::make_shared<ObstacleFactor>(problem_.model, scene.sdf, old->link(), old->sphere(),
                                                   static_cast<int>(old->keys().front().time), old->eps(),
                                                   old->noise());
      std::vector<Eigen::MatrixXd> H_old, H_new;
      const Eigen::VectorXd r_old = old->evaluate(est, &H_old);
      const Eigen::VectorXd r_new = repl->evaluate(est, &H_new);
      bool differs = (r_old - r_new).cwiseAbs().maxCoeff() > 0.0;
      for (std::size_t k = 0; k < H_old.size() && !differs; ++k) differs = (H_old[k] - H_new[k]).cwiseAbs().maxCoeff() > 0.0;
      if (!differs) continue;
      removed.push_back(id);
      added.push_back(repl);
      slots.push_back(slot);
    }
    if (removed.empty()) break;
    const auto r = apply(removed, added, {}, log);
    for (std::size_t i = 0; i < slots.size(); ++i) pg_.obstacle_factors[slots[i]].back() = r.added_ids[i];
    relinearize(log);
  }
  return finish(log, initial_error, t0);
}

ValidationReport validate_trajectory(const Trajectory& traj, const RobotModel& model, const Scene* scene,
                                     const std::optional<std::variant<JointState, Pose>>& goal,
                                     const ValidationTolerances& tol) {
  const int n = model.numJoints();
  if (traj.points.empty()) throw DimensionError("empty trajectory");
  for (const auto& pt : traj.points) {
    if (pt.q.size() != n || pt.qd.size() != n || pt.qdd.size() != n || pt.torque.size() != n) {
      throw DimensionError("trajectory has " + std::to_string(pt.q.size()) + " joints, model has " + std::to_string(n));
    }
  }
  ValidationReport rep;
  for (int t = 0; t < static_cast<int>(traj.points.size()); ++t) {
    const auto& pt = traj.points[t];
    const Eigen::VectorXd tau = rnea_inverse_dynamics(model, pt.q, pt.qd, pt.qdd);
    const double defect = max_abs(tau - pt.torque);
    if (rep.worst_dynamics_step < 0 || defect > rep.max_dynamics_defect) {
      rep.max_dynamics_defect = defect;
      rep.worst_dynamics_step = t;
    }
    for (int j = 0; j < n; ++j) {
      const auto& l = model.joint(j).limits;
      const std::array<std::pair<const char*, std::array<double, 3>>, 4> checks{{
          {"q", {pt.q(j), l.q_min, l.q_max}},
          {"dq", {pt.qd(j), -l.vel_max, l.vel_max}},
          {"ddq", {pt.qdd(j), -l.acc_max, l.acc_max}},
          {"tau", {pt.torque(j), -l.torque_max, l.torque_max}},
      }};
      for (const auto& [name, c] : checks) {
        const double over = std::max(c[1] - c[0], c[0] - c[2]);
        rep.max_limit_violation = std::max(rep.max_limit_violation, over);
        if (over > tol.limit_slack) rep.violations.push_back({t, j, name, over});
      }
    }
    if (scene && scene->sdf) {
      for (const auto& s : sphere_placements(model, pt.q)) {
        rep.min_clearance = std::min(rep.min_clearance, scene->sdf->query(s.center).distance - s.radius);
      }
    }
    if (t > 0) {
      const auto& prev = traj.points[t - 1];
      const double dt = pt.t - prev.t;
      if (dt > 0) {
        Eigen::VectorXd xp(3 * n), xn(3 * n);
        xp << prev.q, prev.qd, prev.qdd;
        xn << pt.q, pt.qd, pt.qdd;
        rep.max_gp_defect = std::max(rep.max_gp_defect, max_abs(xn - gp_transition(dt, n) * xp));
      }
    }
  }
  if (goal) {
    const auto& last = traj.points.back();
    if (const auto* g = std::get_if<JointState>(&*goal)) {
      rep.goal_error = max_abs(last.q - g->q);
    } else {
      rep.goal_error = pose_residual(model, last.q, std::get<Pose>(*goal)).norm();
    }
  }
  rep.passed = rep.max_dynamics_defect <= tol.dynamics && rep.violations.empty() &&
               (!scene || rep.min_clearance >= tol.min_clearance) && (!goal || rep.goal_error <= tol.goal);
  return rep;
}

double total_abs_torque(const Trajectory& traj) {
  double s = 0.0;
  for (const auto& pt : traj.points) s += pt.torque.cwiseAbs().sum();
  return s;
}

}  // namespace kdfg
