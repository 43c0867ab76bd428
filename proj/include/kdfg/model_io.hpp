#pragma once

#include <filesystem>
#include <string>

#include "kdfg/robot_model.hpp"

namespace kdfg {

/// Parse a robot description document (YAML):
///
///   robot:
///     name: rr_planar
///     gravity: [0, -9.81, 0]
///     joints:
///       - axis: [0, 0, 1, 0, 0, 0]          # angular first, child frame
///         home: {rotation: [9 values, row-major], translation: [3]}
///         limits: {q_min, q_max, vel_max, acc_max, torque_max}
///         actuated: true
///     links:
///       - {mass, inertia: [9, about the COM], com: [3], spheres: [{offset: [3], radius}]}
///     end_effector: {rotation: [9], translation: [3]}
///
/// Throws ConfigError naming the field and line.
RobotModel parse_model(const std::string& text, const std::string& source = "model");
RobotModel load_model_file(const std::filesystem::path& path);

/// Directory holding the bundled models, configs and scenes.
/// KDFG_DATA_DIR in the environment overrides the compiled-in location.
std::filesystem::path data_dir();

/// One of the bundled models: acrobot, rr_planar, arm3, arm7.
RobotModel bundled_model(const std::string& name);

}  // namespace kdfg
