#include "kdfg/trajectory_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "kdfg/errors.hpp"

namespace kdfg {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const nlohmann::json& j, std::size_t expected, const std::string& what) {
  const auto v = j.get<std::vector<double>>();
  if (expected > 0 && v.size() != expected) throw DimensionError(what + " has " + std::to_string(v.size()) + " entries");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int n = traj.joints();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "t";
  for (const char* prefix : {"q_", "dq_", "ddq_", "tau_"}) {
    for (int j = 0; j < n; ++j) out << ',' << prefix << j;
  }
  out << '\n';
  for (const auto& pt : traj.points) {
    out << pt.t;
    for (const Eigen::VectorXd* v : {&pt.q, &pt.qd, &pt.qdd, &pt.torque}) {
      for (int j = 0; j < n; ++j) out << ',' << (*v)(j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& path) {
  auto out = open_out(path);
  write_trajectory_csv(traj, out);
}

Trajectory read_trajectory_csv(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ConfigError(source, 1, "empty trajectory file");
  ++line_no;
  const auto header = split(trim(line), ',');
  if (header.empty() || trim(header[0]) != "t" || (header.size() - 1) % 4 != 0 || header.size() < 5) {
    throw ConfigError(source, line_no, "header must be t, q_*, dq_*, ddq_*, tau_*");
  }
  const int n = static_cast<int>(header.size() - 1) / 4;
  const char* prefixes[] = {"q_", "dq_", "ddq_", "tau_"};
  for (int b = 0; b < 4; ++b) {
    for (int j = 0; j < n; ++j) {
      const std::string expect = prefixes[b] + std::to_string(j);
      if (trim(header[1 + b * n + j]) != expect) {
        throw ConfigError(source, line_no, "expected column " + expect + ", found " + trim(header[1 + b * n + j]));
      }
    }
  }
  Trajectory traj;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw ConfigError(source, line_no,
                        "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        const std::string cell = trim(cells[c]);
        vals[c] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(source, line_no, "column " + trim(header[c]) + " is not a number");
      }
    }
    TrajectoryPoint pt;
    pt.t = vals[0];
    pt.q = Eigen::Map<const Eigen::VectorXd>(&vals[1], n);
    pt.qd = Eigen::Map<const Eigen::VectorXd>(&vals[1 + n], n);
    pt.qdd = Eigen::Map<const Eigen::VectorXd>(&vals[1 + 2 * n], n);
    pt.torque = Eigen::Map<const Eigen::VectorXd>(&vals[1 + 3 * n], n);
    if (!traj.points.empty() && !(pt.t > traj.points.back().t)) {
      throw ConfigError(source, line_no, "time must be strictly increasing");
    }
    traj.points.push_back(std::move(pt));
  }
  if (traj.points.empty()) throw ConfigError(source, line_no, "no trajectory rows");
  return traj;
}

Trajectory read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open trajectory file");
  return read_trajectory_csv(in, path.string());
}

nlohmann::json to_json(const Trajectory& traj) {
  nlohmann::json j;
  j["joints"] = traj.joints();
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& pt : traj.points) {
    nlohmann::json p;
    p["t"] = pt.t;
    p["q"] = to_vec(pt.q);
    p["dq"] = to_vec(pt.qd);
    p["ddq"] = to_vec(pt.qdd);
    p["tau"] = to_vec(pt.torque);
    for (const auto& [key, list] : {std::pair{"twists", &pt.twists}, std::pair{"accelerations", &pt.accelerations},
                                    std::pair{"wrenches", &pt.wrenches}}) {
      auto& arr = p[key] = nlohmann::json::array();
      for (const auto& v : *list) arr.push_back(to_vec(v));
    }
    pts.push_back(std::move(p));
  }
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    Trajectory traj;
    const std::size_t n = j.at("joints").get<std::size_t>();
    for (const auto& p : j.at("points")) {
      TrajectoryPoint pt;
      pt.t = p.at("t").get<double>();
      pt.q = from_vec(p.at("q"), n, "q");
      pt.qd = from_vec(p.at("dq"), n, "dq");
      pt.qdd = from_vec(p.at("ddq"), n, "ddq");
      pt.torque = from_vec(p.at("tau"), n, "tau");
      for (const auto& [key, list] : {std::pair{"twists", &pt.twists}, std::pair{"accelerations", &pt.accelerations},
                                      std::pair{"wrenches", &pt.wrenches}}) {
        if (!p.contains(key)) continue;
        for (const auto& v : p.at(key)) list->push_back(from_vec(v, 6, key));
      }
      traj.points.push_back(std::move(pt));
    }
    return traj;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("trajectory", 0, e.what());
  }
}

void write_plot_data(const Trajectory& traj, const fs::path& path) {
  auto out = open_out(path);
  const int n = traj.joints();
  out << "# t";
  for (int j = 0; j < n; ++j) out << " q_" << j;
  for (int j = 0; j < n; ++j) out << " tau_" << j;
  out << '\n';
  for (const auto& pt : traj.points) {
    out << pt.t;
    for (int j = 0; j < n; ++j) out << ' ' << pt.q(j);
    for (int j = 0; j < n; ++j) out << ' ' << pt.torque(j);
    out << '\n';
  }
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["passed"] = r.passed;
  j["max_dynamics_defect"] = r.max_dynamics_defect;
  j["worst_dynamics_step"] = r.worst_dynamics_step;
  j["max_limit_violation"] = r.max_limit_violation;
  j["min_clearance"] = r.min_clearance;
  j["goal_error"] = r.goal_error;
  j["max_gp_defect"] = r.max_gp_defect;
  auto& v = j["violations"] = nlohmann::json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"step", x.step}, {"joint", x.joint}, {"quantity", x.quantity}, {"amount", x.amount}});
  }
  return j;
}

nlohmann::json to_json(const SuccessReport& r) {
  return {{"success", r.success},
          {"max_equality_residual", r.max_equality_residual},
          {"max_limit_violation", r.max_limit_violation},
          {"min_clearance", r.min_clearance}};
}

nlohmann::json to_json(const PlanResult& result) {
  nlohmann::json j = to_json(result.stats);
  j["report"] = to_json(result.report);
  j["projection_iterations"] = result.projection_iterations;
  j["projection_shift"] = result.projection_shift;
  j["total_abs_torque"] = total_abs_torque(result.trajectory);
  return j;
}

void write_json(const nlohmann::json& j, const fs::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace kdfg
