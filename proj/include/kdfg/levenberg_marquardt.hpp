#pragma once

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

#include "kdfg/factor.hpp"
#include "kdfg/ordering.hpp"
#include "kdfg/values.hpp"

namespace kdfg {

enum class DampingType {
  kIdentity,  // lambda * I
  kDiagonal,  // lambda * diag(J^T J), floored at min_diagonal
};

struct LMParams {
  double lambda_initial = 0.01;
  double lambda_factor = 10.0;
  double lambda_max = 1e10;
  int max_iterations = 200;
  double relative_tolerance = 1e-5;
  double absolute_tolerance = 1e-20;
  OrderingType ordering = OrderingType::kForward;
  /// When a step is rejected, retry it once with a second-order correction that
  /// removes the linearization error at x + delta (same damped system).
  bool second_order_correction = false;
  DampingType damping = DampingType::kIdentity;
  double min_diagonal = 1e-6;
};

enum class SolveStatus { kConverged, kMaxIterations, kStalled };
std::string to_string(SolveStatus status);

struct SolveStats {
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;       // outer iterations (relinearizations)
  int accepted_steps = 0;
  double initial_error = 0.0;
  double final_error = 0.0;
  std::vector<double> lambda_trace;  // lambda of every attempted step
  std::vector<double> error_trace;   // error after every accepted step
  double wall_time_ms = 0.0;
  std::optional<std::size_t> reeliminated_keys;  // incremental solves only
  std::optional<std::size_t> total_keys;
};

nlohmann::json to_json(const SolveStats& stats);

/// Levenberg-Marquardt with lambda*I damping: lambda is multiplied by
/// `lambda_factor` after a rejected step and divided by it after an accepted one.
/// The returned values never have a larger error than `init`.
std::pair<Values, SolveStats> optimize_lm(const FactorGraph& graph, const Values& init, const LMParams& params = {});

}  // namespace kdfg
