#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdfg/key.hpp"
#include "kdfg/noise_model.hpp"
#include "kdfg/values.hpp"

namespace kdfg {

/// Whitened linear factor |sum_k A_k dx_k - b|^2 over a subset of variables.
struct LinearFactor {
  std::vector<Key> keys;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd rhs;

  int rows() const { return static_cast<int>(rhs.size()); }
  /// 0.5 * |A dx - b|^2
  double error(const Values& delta) const;
};

using GaussianFactorGraph = std::vector<LinearFactor>;

double linear_error(const GaussianFactorGraph& graph, const Values& delta);

/// Nonlinear least-squares term. `evaluate` returns the unwhitened residual and,
/// when `jacobians` is non-null, one d(residual)/d(key) block per key.
class Factor {
 public:
  Factor(std::vector<Key> keys, NoiseModel noise) : keys_(std::move(keys)), noise_(std::move(noise)) {}
  virtual ~Factor() = default;

  const std::vector<Key>& keys() const { return keys_; }
  const NoiseModel& noise() const { return noise_; }
  int dim() const { return noise_.dim(); }

  virtual Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const = 0;

  /// Short label used in reports ("twist", "gp_prior", ...).
  virtual std::string kind() const { return "factor"; }

  Eigen::VectorXd whitenedResidual(const Values& values) const { return noise_.whiten(evaluate(values, nullptr)); }
  double error(const Values& values) const { return noise_.error(evaluate(values, nullptr)); }
  LinearFactor linearize(const Values& values) const;

 private:
  std::vector<Key> keys_;
  NoiseModel noise_;
};

using FactorPtr = std::shared_ptr<const Factor>;
using FactorId = std::size_t;

/// r(x) = x - mean
class PriorFactor : public Factor {
 public:
  PriorFactor(const Key& key, Eigen::VectorXd mean, NoiseModel noise);
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;
  std::string kind() const override { return "prior"; }
  const Eigen::VectorXd& mean() const { return mean_; }

 private:
  Eigen::VectorXd mean_;
};

/// Factor defined by a callable; useful for tests and one-off terms.
class FunctionFactor : public Factor {
 public:
  using Function = std::function<Eigen::VectorXd(const std::vector<Eigen::VectorXd>&, std::vector<Eigen::MatrixXd>*)>;
  FunctionFactor(std::vector<Key> keys, NoiseModel noise, Function f)
      : Factor(std::move(keys), std::move(noise)), f_(std::move(f)) {}
  Eigen::VectorXd evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  Function f_;
};

/// Factor container with stable ids; removed slots stay empty.
class FactorGraph {
 public:
  FactorId add(FactorPtr factor);
  void remove(FactorId id);
  const FactorPtr& at(FactorId id) const;
  bool contains(FactorId id) const { return id < factors_.size() && factors_[id] != nullptr; }

  /// Number of slots (including removed ones).
  std::size_t slots() const { return factors_.size(); }
  std::size_t size() const { return live_; }

  double error(const Values& values) const;
  GaussianFactorGraph linearize(const Values& values) const;
  std::vector<Key> keys() const;

  template <typename Fn>
  void forEach(Fn&& fn) const {
    for (FactorId i = 0; i < factors_.size(); ++i) {
      if (factors_[i]) fn(i, *factors_[i]);
    }
  }

 private:
  std::vector<FactorPtr> factors_;
  std::size_t live_ = 0;
};

}  // namespace kdfg
