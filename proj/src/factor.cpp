#include "kdfg/factor.hpp"

#include <set>

namespace kdfg {

double LinearFactor::error(const Values& delta) const {
  Eigen::VectorXd r = -rhs;
  for (std::size_t k = 0; k < keys.size(); ++k) r += blocks[k] * delta.at(keys[k]);
  return 0.5 * r.squaredNorm();
}

double linear_error(const GaussianFactorGraph& graph, const Values& delta) {
  double e = 0.0;
  for (const auto& f : graph) e += f.error(delta);
  return e;
}

LinearFactor Factor::linearize(const Values& values) const {
  std::vector<Eigen::MatrixXd> H;
  const Eigen::VectorXd r = evaluate(values, &H);
  if (r.size() != dim()) throw DimensionError(kind() + " factor residual dimension mismatch");
  if (H.size() != keys_.size()) throw DimensionError(kind() + " factor returned wrong number of jacobians");
  LinearFactor lf;
  lf.keys = keys_;
  lf.blocks.reserve(H.size());
  for (std::size_t k = 0; k < H.size(); ++k) {
    if (H[k].rows() != dim() || H[k].cols() != values.at(keys_[k]).size()) {
      throw DimensionError(kind() + " factor jacobian block has wrong shape for " + to_string(keys_[k]));
    }
    lf.blocks.push_back(noise_.whiten(H[k]));
  }
  lf.rhs = -noise_.whiten(r);
  return lf;
}

PriorFactor::PriorFactor(const Key& key, Eigen::VectorXd mean, NoiseModel noise)
    : Factor({key}, std::move(noise)), mean_(std::move(mean)) {
  if (mean_.size() != dim()) throw DimensionError("prior mean dimension does not match noise model");
}

Eigen::VectorXd PriorFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  const Eigen::VectorXd& x = values.at(keys()[0]);
  if (x.size() != mean_.size()) throw DimensionError("prior on " + to_string(keys()[0]) + " has wrong dimension");
  if (jacobians) {
    jacobians->assign(1, Eigen::MatrixXd::Identity(dim(), dim()));
  }
  return x - mean_;
}

Eigen::VectorXd FunctionFactor::evaluate(const Values& values, std::vector<Eigen::MatrixXd>* jacobians) const {
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(keys().size());
  for (const auto& k : keys()) xs.push_back(values.at(k));
  return f_(xs, jacobians);
}

FactorId FactorGraph::add(FactorPtr factor) {
  if (!factor) throw Error("null factor");
  factors_.push_back(std::move(factor));
  ++live_;
  return factors_.size() - 1;
}

void FactorGraph::remove(FactorId id) {
  if (!contains(id)) throw Error("no factor with id " + std::to_string(id));
  factors_[id].reset();
  --live_;
}

const FactorPtr& FactorGraph::at(FactorId id) const {
  if (!contains(id)) throw Error("no factor with id " + std::to_string(id));
  return factors_[id];
}

double FactorGraph::error(const Values& values) const {
  double e = 0.0;
  forEach([&](FactorId, const Factor& f) { e += f.error(values); });
  return e;
}

GaussianFactorGraph FactorGraph::linearize(const Values& values) const {
  GaussianFactorGraph g;
  g.reserve(live_);
  forEach([&](FactorId, const Factor& f) { g.push_back(f.linearize(values)); });
  return g;
}

std::vector<Key> FactorGraph::keys() const {
  std::set<Key> ks;
  forEach([&](FactorId, const Factor& f) { ks.insert(f.keys().begin(), f.keys().end()); });
  return {ks.begin(), ks.end()};
}

}  // namespace kdfg
