#include "kdfg/benchmark.hpp"

#include <algorithm>

#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

PlanTrial record(const PlanResult& r, const Eigen::VectorXd& goal) {
  PlanTrial t;
  t.goal = goal;
  t.success = r.report.success;
  t.time_ms = r.stats.wall_time_ms;
  t.total_torque = total_abs_torque(r.trajectory);
  t.iterations = r.stats.iterations;
  return t;
}

ColumnSummary summarize(const std::vector<const PlanTrial*>& trials) {
  ColumnSummary s;
  if (trials.empty()) return s;
  std::vector<double> times;
  for (const PlanTrial* t : trials) {
    s.success_rate += t->success;
    s.avg_time += t->time_ms / 1000.0;
    s.max_time = std::max(s.max_time, t->time_ms / 1000.0);
    s.avg_total_torque += t->total_torque;
    times.push_back(t->time_ms / 1000.0);
  }
  const double k = static_cast<double>(trials.size());
  s.success_rate /= k;
  s.avg_time /= k;
  s.avg_total_torque /= k;
  s.median_time = median(times);
  return s;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json trial_json(const PlanTrial& t) {
  return {{"success", t.success},
          {"time", t.time_ms / 1000.0},
          {"total_torque", t.total_torque},
          {"iterations", t.iterations}};
}

}  // namespace

Eigen::VectorXd sample_goal(const RobotModel& model, std::mt19937_64& rng, double margin) {
  const int n = model.numJoints();
  Eigen::VectorXd g(n);
  for (int j = 0; j < n; ++j) {
    const auto& l = model.joint(j).limits;
    const double c = 0.5 * (l.q_min + l.q_max);
    const double h = 0.5 * (l.q_max - l.q_min) * (1.0 - margin);
    g(j) = std::uniform_real_distribution<double>(c - h, c + h)(rng);
  }
  return g;
}

PlanSuiteResult run_plan_suite(const BenchmarkSuite& suite, const TrialCallback& progress) {
  PlanSuiteResult out;
  std::mt19937_64 rng(suite.seed);
  const PlanningProblem& base = suite.base.problem;
  for (int k = 0; k < suite.trials; ++k) {
    if (progress) progress(k, suite.trials);
    PlanningProblem p = base;
    const Eigen::VectorXd goal = sample_goal(*p.model, rng, suite.goal_margin);
    p.goal = JointState::AtRest(goal);
    out.trials.push_back(record(plan_batch(p), goal));
  }
  std::vector<const PlanTrial*> all;
  for (const auto& t : out.trials) all.push_back(&t);
  out.summary = summarize(all);
  return out;
}

std::pair<double, double> quarter_changes(const Trajectory& a, const Trajectory& b) {
  const int n = static_cast<int>(std::min(a.points.size(), b.points.size()));
  const int quarter = std::max(1, n / 4);
  double early = 0.0, late = 0.0;
  for (int t = 0; t < quarter; ++t) early += (a.points[t].q - b.points[t].q).cwiseAbs().mean();
  for (int t = n - quarter; t < n; ++t) late += (a.points[t].q - b.points[t].q).cwiseAbs().mean();
  return {early / quarter, late / quarter};
}

ReplanSuiteResult run_replan_suite(const BenchmarkSuite& suite, const TrialCallback& progress) {
  ReplanSuiteResult out;
  std::mt19937_64 rng(suite.seed);
  const PlanningProblem& base = suite.base.problem;
  const int n = base.model->numJoints();
  std::vector<double> fractions, speedups;
  int local = 0;
  for (int k = 0; k < suite.trials; ++k) {
    if (progress) progress(k, suite.trials);
    ReplanTrial trial;
    PlanningProblem p = base;
    trial.goal = sample_goal(*p.model, rng, suite.goal_margin);
    trial.new_goal = trial.goal;
    for (int j = 0; j < n; ++j) {
      const auto& l = p.model->joint(j).limits;
      const double c = 0.5 * (l.q_min + l.q_max);
      const double h = 0.5 * (l.q_max - l.q_min) * (1.0 - suite.goal_margin);
      const double d = std::uniform_real_distribution<double>(-suite.perturbation, suite.perturbation)(rng);
      trial.new_goal(j) = std::clamp(trial.goal(j) + d, c - h, c + h);
    }
    p.goal = JointState::AtRest(trial.goal);
    ReplanSession session = open_session(p);
    const PlanResult original = session.current();
    trial.original_success = original.report.success;

    PlanningProblem moved = p;
    moved.goal = JointState::AtRest(trial.new_goal);
    trial.cold = record(plan_batch(moved), trial.new_goal);
    trial.warm = record(plan_batch_from(moved, original.values), trial.new_goal);
    const PlanResult inc = session.replanGoal(moved.goal);
    trial.incremental = record(inc, trial.new_goal);
    trial.reeliminated_keys = inc.stats.reeliminated_keys.value_or(0);
    trial.total_keys = inc.stats.total_keys.value_or(0);
    std::tie(trial.early_change, trial.late_change) = quarter_changes(inc.trajectory, original.trajectory);

    if (trial.total_keys > 0) fractions.push_back(static_cast<double>(trial.reeliminated_keys) / trial.total_keys);
    if (trial.incremental.time_ms > 0) speedups.push_back(trial.warm.time_ms / trial.incremental.time_ms);
    local += trial.early_change < trial.late_change;
    out.trials.push_back(std::move(trial));
  }
  std::vector<const PlanTrial*> cold, warm, inc;
  for (const auto& t : out.trials) {
    cold.push_back(&t.cold);
    warm.push_back(&t.warm);
    inc.push_back(&t.incremental);
  }
  out.cold = summarize(cold);
  out.warm = summarize(warm);
  out.incremental = summarize(inc);
  out.median_reeliminated_fraction = median(fractions);
  out.median_speedup = median(speedups);
  out.locality_rate = out.trials.empty() ? 0.0 : static_cast<double>(local) / out.trials.size();
  return out;
}

nlohmann::json to_json(const ColumnSummary& s) {
  return {{"success_rate", s.success_rate},
          {"avg_time", s.avg_time},
          {"max_time", s.max_time},
          {"median_time", s.median_time},
          {"avg_total_torque", s.avg_total_torque}};
}

nlohmann::json to_json(const PlanSuiteResult& r) {
  nlohmann::json j = to_json(r.summary);
  auto& trials = j["trials"] = nlohmann::json::array();
  for (const auto& t : r.trials) {
    nlohmann::json tj = trial_json(t);
    tj["goal"] = to_vec(t.goal);
    trials.push_back(std::move(tj));
  }
  return j;
}

nlohmann::json to_json(const ReplanSuiteResult& r) {
  nlohmann::json j;
  j["DFGP-L"] = to_json(r.cold);
  j["DFGP-W"] = to_json(r.warm);
  j["iDFGP"] = to_json(r.incremental);
  j["median_reeliminated_fraction"] = r.median_reeliminated_fraction;
  j["median_speedup_vs_warm"] = r.median_speedup;
  j["locality_rate"] = r.locality_rate;
  auto& trials = j["trials"] = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"goal", to_vec(t.goal)},
                      {"new_goal", to_vec(t.new_goal)},
                      {"original_success", t.original_success},
                      {"DFGP-L", trial_json(t.cold)},
                      {"DFGP-W", trial_json(t.warm)},
                      {"iDFGP", trial_json(t.incremental)},
                      {"reeliminated_keys", t.reeliminated_keys},
                      {"total_keys", t.total_keys},
                      {"early_change", t.early_change},
                      {"late_change", t.late_change}});
  }
  return j;
}

}  // namespace kdfg
