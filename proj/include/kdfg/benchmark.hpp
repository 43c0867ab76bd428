#pragma once

#include <functional>
#include <random>
#include <vector>

#include "json.hpp"

#include "kdfg/config.hpp"

namespace kdfg {

/// Uniform joint vector within the limits shrunk by `margin` (fraction of each half-range).
Eigen::VectorXd sample_goal(const RobotModel& model, std::mt19937_64& rng, double margin);

struct PlanTrial {
  Eigen::VectorXd goal;
  bool success = false;
  double time_ms = 0.0;
  double total_torque = 0.0;
  int iterations = 0;
};

struct ColumnSummary {
  double success_rate = 0.0;
  double avg_time = 0.0;  // seconds
  double max_time = 0.0;
  double median_time = 0.0;
  double avg_total_torque = 0.0;
};

struct PlanSuiteResult {
  std::vector<PlanTrial> trials;
  ColumnSummary summary;
};

struct ReplanTrial {
  Eigen::VectorXd goal, new_goal;
  bool original_success = false;
  PlanTrial cold, warm, incremental;  // DFGP-L, DFGP-W, iDFGP
  std::size_t reeliminated_keys = 0;
  std::size_t total_keys = 0;
  double early_change = 0.0;  // mean per-joint |dq| over the first quarter of steps
  double late_change = 0.0;   // ... and over the last quarter
};

struct ReplanSuiteResult {
  std::vector<ReplanTrial> trials;
  ColumnSummary cold, warm, incremental;
  double median_reeliminated_fraction = 0.0;
  double median_speedup = 0.0;  // warm / incremental wall time
  double locality_rate = 0.0;   // fraction of trials with early_change < late_change
};

using TrialCallback = std::function<void(int trial, int total)>;

/// Goals are drawn in order from one generator seeded with `suite.seed`.
PlanSuiteResult run_plan_suite(const BenchmarkSuite& suite, const TrialCallback& progress = {});

/// Each trial plans to a sampled goal, then moves the goal by U(-p, p) per joint
/// (kept inside the shrunk limits) and replans three ways.
ReplanSuiteResult run_replan_suite(const BenchmarkSuite& suite, const TrialCallback& progress = {});

/// Mean per-joint |q_a - q_b| over the first and last quarter of the steps.
std::pair<double, double> quarter_changes(const Trajectory& a, const Trajectory& b);

nlohmann::json to_json(const ColumnSummary& s);
nlohmann::json to_json(const PlanSuiteResult& r);
nlohmann::json to_json(const ReplanSuiteResult& r);

}  // namespace kdfg
