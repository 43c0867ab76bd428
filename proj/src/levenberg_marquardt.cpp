#include "kdfg/levenberg_marquardt.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "kdfg/bayes_tree.hpp"

namespace kdfg {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kStalled: return "stalled";
  }
  return "unknown";
}

nlohmann::json to_json(const SolveStats& stats) {
  nlohmann::json j;
  j["status"] = to_string(stats.status);
  j["iterations"] = stats.iterations;
  j["accepted_steps"] = stats.accepted_steps;
  j["initial_error"] = stats.initial_error;
  j["final_error"] = stats.final_error;
  j["lambda_trace"] = stats.lambda_trace;
  j["wall_time_ms"] = stats.wall_time_ms;
  if (stats.reeliminated_keys) j["reeliminated_keys"] = *stats.reeliminated_keys;
  if (stats.total_keys) j["total_keys"] = *stats.total_keys;
  return j;
}

std::pair<Values, SolveStats> optimize_lm(const FactorGraph& graph, const Values& init, const LMParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveStats stats;
  Values x = init;
  double err = graph.error(x);
  stats.initial_error = err;
  stats.status = SolveStatus::kMaxIterations;

  const std::vector<Key> ordering = make_ordering(graph, params.ordering);
  double lambda = params.lambda_initial;

  while (stats.iterations < params.max_iterations) {
    if (err <= params.absolute_tolerance) {
      stats.status = SolveStatus::kConverged;
      break;
    }
    const GaussianFactorGraph linear = graph.linearize(x);
    const Values zero = x.zeroLike();
    const double linear_err0 = linear_error(linear, zero);
    std::map<Key, Eigen::VectorXd> scale;
    for (const auto& [k, v] : x) scale[k] = Eigen::VectorXd::Ones(v.size());
    if (params.damping == DampingType::kDiagonal) {
      for (auto& [k, v] : scale) v.setZero();
      for (const auto& lf : linear) {
        for (std::size_t b = 0; b < lf.keys.size(); ++b) {
          scale.at(lf.keys[b]) += lf.blocks[b].colwise().squaredNorm().transpose();
        }
      }
      for (auto& [k, v] : scale) v = v.cwiseMax(params.min_diagonal).cwiseSqrt();
    }
    ++stats.iterations;

    bool accepted = false;
    bool converged = false;
    bool first_attempt = true;
    while (true) {
      GaussianFactorGraph damped = linear;
      damped.reserve(linear.size() + x.size());
      const double sqrt_lambda = std::sqrt(lambda);
      for (const auto& [k, s] : scale) {
        damped.push_back({{k}, {Eigen::MatrixXd((sqrt_lambda * s).asDiagonal())}, Eigen::VectorXd::Zero(s.size())});
      }
      stats.lambda_trace.push_back(lambda);
      const Values delta = solve(eliminate(damped, ordering));
      Values candidate = x.retract(delta);
      double cand_err = graph.error(candidate);
      const double predicted = linear_err0 - linear_error(linear, delta);

      if (params.second_order_correction && !(std::isfinite(cand_err) && cand_err < err)) {
        // Second-order correction: re-solve from x with the rhs shifted by the
        // linearization error observed at x + delta.
        std::size_t i = 0;
        graph.forEach([&](FactorId, const Factor& f) {
          const LinearFactor& lf = linear[i];
          Eigen::VectorXd model = -lf.rhs;
          for (std::size_t k = 0; k < lf.keys.size(); ++k) model += lf.blocks[k] * delta.at(lf.keys[k]);
          damped[i].rhs = model - f.whitenedResidual(candidate);
          ++i;
        });
        const Values corrected_step = solve(eliminate(damped, ordering));
        Values corrected = x.retract(corrected_step);
        const double corrected_err = graph.error(corrected);
        if (std::isfinite(corrected_err) && corrected_err < err) {
          candidate = std::move(corrected);
          cand_err = corrected_err;
        }
      }

      if (std::isfinite(cand_err) && cand_err < err) {
        const double decrease = err - cand_err;
        x = candidate;
        err = cand_err;
        ++stats.accepted_steps;
        stats.error_trace.push_back(err);
        lambda = std::max(lambda / params.lambda_factor, 1e-300);
        accepted = true;
        converged = decrease < params.relative_tolerance * (err + decrease);
        break;
      }
      if (first_attempt && predicted <= params.relative_tolerance * err) {
        // Nothing left to gain from the local model.
        converged = true;
        break;
      }
      first_attempt = false;
      lambda *= params.lambda_factor;
      if (lambda > params.lambda_max) break;
    }
    if (converged) {
      stats.status = SolveStatus::kConverged;
      break;
    }
    if (!accepted) {
      stats.status = SolveStatus::kStalled;
      break;
    }
  }
  stats.final_error = err;
  stats.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(x), std::move(stats)};
}

}  // namespace kdfg
