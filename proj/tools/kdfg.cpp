// kdfg command-line driver: plan, replan, benchmark, validate.
//
// Exit codes: 0 success, 1 usage or config error, 2 solver failure
// (validate: 2 when a tolerance is not met).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kdfg/benchmark.hpp"
#include "kdfg/config.hpp"
#include "kdfg/errors.hpp"
#include "kdfg/model_io.hpp"
#include "kdfg/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSolverFailed = 2;

struct GlobalFlags {
  std::optional<int> steps;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ordering;
  std::string json_stats;
  bool compare = false;
  bool quiet = false;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw kdfg::ConfigError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_overrides(kdfg::PlanningProblem& p, const GlobalFlags& g) {
  if (g.steps) p.steps = *g.steps;
  if (g.horizon) p.horizon = *g.horizon;
  if (g.ordering) p.lm.ordering = kdfg::parse_ordering_type(*g.ordering);
  p.validate();
}

kdfg::ProblemConfig load_config(const std::string& path, const GlobalFlags& g) {
  kdfg::ProblemConfig cfg = kdfg::load_problem_config(path);
  apply_overrides(cfg.problem, g);
  return cfg;
}

fs::path pick(const fs::path& configured, const fs::path& out_dir, const std::string& name) {
  return configured.empty() ? out_dir / name : configured;
}

void write_outputs(const kdfg::PlanResult& r, const kdfg::OutputSpec& out, const fs::path& out_dir,
                   const std::string& prefix, const std::string& stats_override) {
  kdfg::write_trajectory_csv(r.trajectory, pick(out.trajectory_csv, out_dir, prefix + "trajectory.csv"));
  kdfg::write_json(kdfg::to_json(r.trajectory), pick(out.trajectory_json, out_dir, prefix + "trajectory.json"));
  kdfg::write_plot_data(r.trajectory, pick(out.plot_data, out_dir, prefix + "plot.dat"));
  const fs::path stats = stats_override.empty() ? pick(out.stats_json, out_dir, prefix + "stats.json") : fs::path(stats_override);
  kdfg::write_json(kdfg::to_json(r), stats);
}

void summary_line(const char* what, const kdfg::PlanResult& r) {
  std::cerr << what << ": " << (r.report.success ? "success" : "FAILED") << ", " << r.stats.iterations
            << " iterations, " << r.stats.wall_time_ms / 1000.0 << " s, equality residual "
            << r.report.max_equality_residual << ", clearance " << r.report.min_clearance << '\n';
}

int cmd_plan(const std::string& config, const std::string& out_dir, const GlobalFlags& g) {
  const kdfg::ProblemConfig cfg = load_config(config, g);
  const kdfg::PlanResult r = kdfg::plan_batch(cfg.problem);
  write_outputs(r, cfg.output, out_dir, "", g.json_stats);
  if (!g.quiet) summary_line("plan", r);
  return r.report.success ? kOk : kSolverFailed;
}

int cmd_replan(const std::string& config, const std::string& new_goal, const std::string& scene_delta,
               const std::string& out_dir, const GlobalFlags& g) {
  if (new_goal.empty() == scene_delta.empty()) {
    throw kdfg::ConfigError("replan", 0, "give exactly one of --new-goal and --scene-delta");
  }
  const kdfg::ProblemConfig cfg = load_config(config, g);
  const kdfg::PlanningProblem& problem = cfg.problem;

  // Parse the change before any solve so that input errors exit early.
  kdfg::PlanningProblem changed = problem;
  std::optional<kdfg::ObstacleSet> obstacles;
  if (!new_goal.empty()) {
    changed.goal = kdfg::JointState::AtRest(kdfg::parse_joint_vector(new_goal, problem.model->numJoints(), "new-goal"));
  } else {
    if (!problem.scene) throw kdfg::ConfigError("scene-delta", 0, "the config has no scene to change");
    obstacles = kdfg::apply_scene_delta(read_text(scene_delta), problem.scene->obstacles, scene_delta);
    changed.scene = kdfg::make_scene(*obstacles, problem.scene->grid, problem.scene->epsilon);
  }

  kdfg::ReplanSession session = kdfg::open_session(problem);
  const kdfg::PlanResult original = session.current();
  const kdfg::PlanResult replanned = obstacles ? session.replanScene(*obstacles) : session.replanGoal(changed.goal);
  if (!g.quiet) {
    summary_line("original", original);
    summary_line("replanned", replanned);
  }

  kdfg::write_trajectory_csv(original.trajectory, out_dir / fs::path("original_trajectory.csv"));
  kdfg::write_json(kdfg::to_json(original.trajectory), out_dir / fs::path("original_trajectory.json"));
  kdfg::write_trajectory_csv(replanned.trajectory, out_dir / fs::path("replanned_trajectory.csv"));
  kdfg::write_json(kdfg::to_json(replanned.trajectory), out_dir / fs::path("replanned_trajectory.json"));
  kdfg::write_plot_data(replanned.trajectory, out_dir / fs::path("replanned_plot.dat"));

  json stats;
  stats["original"] = kdfg::to_json(original);
  stats["incremental"] = kdfg::to_json(replanned);
  stats["reeliminated_keys"] = replanned.stats.reeliminated_keys.value_or(0);
  stats["total_keys"] = replanned.stats.total_keys.value_or(0);
  stats["incremental_time"] = replanned.stats.wall_time_ms / 1000.0;
  if (g.compare) {
    const kdfg::PlanResult warm = kdfg::plan_batch_from(changed, original.values);
    const kdfg::PlanResult cold = kdfg::plan_batch(changed);
    if (!g.quiet) {
      summary_line("batch (warm start)", warm);
      summary_line("batch (cold start)", cold);
    }
    stats["batch_warm"] = kdfg::to_json(warm);
    stats["batch_cold"] = kdfg::to_json(cold);
    stats["batch_time"] = warm.stats.wall_time_ms / 1000.0;
    stats["batch_cold_time"] = cold.stats.wall_time_ms / 1000.0;
    stats["speedup"] = warm.stats.wall_time_ms / std::max(replanned.stats.wall_time_ms, 1e-9);
  }
  kdfg::write_json(stats, g.json_stats.empty() ? out_dir / fs::path("replan_stats.json") : fs::path(g.json_stats));
  return replanned.report.success ? kOk : kSolverFailed;
}

int cmd_benchmark(const std::string& suite_path, std::optional<int> trials, const GlobalFlags& g) {
  kdfg::BenchmarkSuite suite = kdfg::load_suite_file(suite_path);
  if (trials) {
    if (*trials < 1) throw kdfg::ConfigError("trials", 0, "must be at least 1");
    suite.trials = *trials;
  }
  if (g.seed) suite.seed = *g.seed;
  apply_overrides(suite.base.problem, g);
  auto progress = [&](int k, int total) {
    if (!g.quiet) std::cerr << "trial " << k + 1 << "/" << total << '\n';
  };
  json out;
  if (suite.mode == kdfg::SuiteMode::kPlan) {
    out = kdfg::to_json(kdfg::run_plan_suite(suite, progress));
  } else {
    out = kdfg::to_json(kdfg::run_replan_suite(suite, progress));
  }
  out["suite"] = suite_path;
  out["seed"] = suite.seed;
  out["trials_run"] = suite.trials;
  std::cout << out.dump(2) << '\n';
  if (!g.json_stats.empty()) kdfg::write_json(out, g.json_stats);
  return kOk;
}

int cmd_validate(const std::string& traj_path, const std::string& model_ref, const std::string& scene_path,
                 const std::string& config, const std::string& goal_text, double dyn_tol) {
  const kdfg::Trajectory traj = fs::path(traj_path).extension() == ".json"
                                    ? kdfg::trajectory_from_json(json::parse(read_text(traj_path)))
                                    : kdfg::read_trajectory_csv(fs::path(traj_path));
  kdfg::ModelPtr model;
  std::optional<kdfg::Scene> scene;
  std::optional<std::variant<kdfg::JointState, kdfg::Pose>> goal;
  if (!config.empty()) {
    const kdfg::ProblemConfig cfg = kdfg::load_problem_config(config);
    model = cfg.problem.model;
    scene = cfg.problem.scene;
    goal = cfg.problem.goal;
  }
  if (!model_ref.empty()) model = kdfg::resolve_model(model_ref, fs::current_path());
  if (!model) throw kdfg::ConfigError("model", 0, "give --model or --config");
  if (!scene_path.empty()) scene = kdfg::load_scene_file(scene_path);
  if (!goal_text.empty()) goal = kdfg::JointState::AtRest(kdfg::parse_joint_vector(goal_text, model->numJoints(), "goal"));

  kdfg::ValidationTolerances tol;
  tol.dynamics = dyn_tol;
  const kdfg::ValidationReport rep = kdfg::validate_trajectory(traj, *model, scene ? &*scene : nullptr, goal, tol);
  std::cout << kdfg::to_json(rep).dump(2) << '\n';
  return rep.passed ? kOk : kSolverFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinodynamic factor-graph planner"};
  app.require_subcommand(1);
  GlobalFlags g;

  app.add_option("--steps", g.steps, "Override the number of time steps")->check(CLI::PositiveNumber);
  app.add_option("--horizon", g.horizon, "Override the time horizon (s)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Benchmark seed");
  app.add_option("--ordering", g.ordering, "Elimination ordering")->check(CLI::IsMember({"forward", "mindegree"}));
  app.add_option("--json-stats", g.json_stats, "Write the stats JSON here");
  app.add_flag("--compare", g.compare, "replan: also time warm and cold batch solves");
  app.add_flag("-q,--quiet", g.quiet, "No progress on standard error");

  std::string config, out_dir = "kdfg_out";
  auto* plan = app.add_subcommand("plan", "Solve one planning problem");
  plan->fallthrough();
  plan->add_option("config", config, "Problem config")->required();
  plan->add_option("-o,--out-dir", out_dir, "Directory for outputs not named in the config");

  std::string new_goal, scene_delta;
  auto* replan = app.add_subcommand("replan", "Plan, change the goal or scene, replan incrementally");
  replan->fallthrough();
  replan->add_option("config", config, "Problem config")->required();
  replan->add_option("--new-goal", new_goal, "New goal configuration, comma separated");
  replan->add_option("--scene-delta", scene_delta, "Obstacle change document");
  replan->add_option("-o,--out-dir", out_dir, "Output directory");

  std::string suite;
  std::optional<int> trials;
  auto* bench = app.add_subcommand("benchmark", "Run a seeded benchmark suite");
  bench->fallthrough();
  bench->add_option("suite", suite, "Suite document")->required();
  bench->add_option("--trials", trials, "Number of trials");

  std::string traj_path, model_ref, scene_path, goal_text;
  double dyn_tol = 1e-3;
  auto* validate = app.add_subcommand("validate", "Check an exported trajectory against the dynamics oracle");
  validate->fallthrough();
  validate->add_option("trajectory", traj_path, "Trajectory CSV or JSON")->required();
  validate->add_option("model", model_ref, "Model name or file");
  validate->add_option("scene", scene_path, "Scene file");
  validate->add_option("--config", config, "Take model, scene and goal from a problem config");
  validate->add_option("--goal", goal_text, "Expected final configuration");
  validate->add_option("--dynamics-tol", dyn_tol, "Allowed |tau - RNEA| per step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*plan) return cmd_plan(config, out_dir, g);
    if (*replan) return cmd_replan(config, new_goal, scene_delta, out_dir, g);
    if (*bench) return cmd_benchmark(suite, trials, g);
    if (*validate) return cmd_validate(traj_path, model_ref, scene_path, config, goal_text, dyn_tol);
  } catch (const kdfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const kdfg::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const kdfg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
