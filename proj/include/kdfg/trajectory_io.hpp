#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "kdfg/planner.hpp"

namespace kdfg {

/// CSV with header t, q_0..q_{n-1}, dq_*, ddq_*, tau_*; one row per time step.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
/// Throws ConfigError on malformed input (line numbers are 1-based).
Trajectory read_trajectory_csv(std::istream& in, const std::string& source = "trajectory");
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Extended form with per-link twists, accelerations and wrenches.
nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

/// Whitespace-separated columns "t q_* tau_*" with a '#' header, for gnuplot.
void write_plot_data(const Trajectory& traj, const std::filesystem::path& path);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const SuccessReport& report);
nlohmann::json to_json(const PlanResult& result);

/// Write `j` (pretty-printed) to `path`, creating parent directories.
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace kdfg
