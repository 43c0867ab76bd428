#include "kdfg/values.hpp"

#include <cmath>
#include <limits>

namespace kdfg {

void Values::insert(const Key& key, Eigen::VectorXd value) {
  auto [it, inserted] = values_.emplace(key, std::move(value));
  if (!inserted) throw Error("duplicate variable " + to_string(key));
}

const Eigen::VectorXd& Values::at(const Key& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UnknownVariableError(key);
  return it->second;
}

Eigen::VectorXd& Values::at(const Key& key) {
  auto it = values_.find(key);
  if (it == values_.end()) throw UnknownVariableError(key);
  return it->second;
}

std::size_t Values::totalDim() const {
  std::size_t n = 0;
  for (const auto& [k, v] : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

Values Values::retract(const Values& delta) const {
  Values out = *this;
  for (const auto& [k, d] : delta) {
    Eigen::VectorXd& v = out.at(k);
    if (v.size() != d.size()) throw DimensionError("delta dimension mismatch for " + to_string(k));
    v += d;
  }
  return out;
}

Values Values::zeroLike() const {
  Values out;
  for (const auto& [k, v] : values_) out.values_.emplace(k, Eigen::VectorXd::Zero(v.size()));
  return out;
}

std::vector<Key> Values::keys() const {
  std::vector<Key> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

double Values::maxAbsDiff(const Values& other) const {
  if (other.size() != size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (const auto& [k, v] : values_) {
    auto it = other.values_.find(k);
    if (it == other.values_.end() || it->second.size() != v.size()) {
      return std::numeric_limits<double>::infinity();
    }
    if (v.size() > 0) m = std::max(m, (v - it->second).cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace kdfg
