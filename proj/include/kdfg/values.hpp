#pragma once

#include <Eigen/Core>

#include <map>
#include <vector>

#include "kdfg/errors.hpp"
#include "kdfg/key.hpp"

namespace kdfg {

/// Assignment of a real vector to each variable. Also used for deltas.
class Values {
 public:
  using Map = std::map<Key, Eigen::VectorXd>;

  void insert(const Key& key, Eigen::VectorXd value);
  void insert_or_assign(const Key& key, Eigen::VectorXd value) { values_.insert_or_assign(key, std::move(value)); }
  void insert(const Key& key, double scalar) { insert(key, Eigen::VectorXd::Constant(1, scalar)); }

  const Eigen::VectorXd& at(const Key& key) const;
  Eigen::VectorXd& at(const Key& key);
  double scalar(const Key& key) const { return at(key)(0); }

  bool contains(const Key& key) const { return values_.count(key) > 0; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t totalDim() const;

  /// this + delta for every key in delta (keys missing from delta are unchanged).
  Values retract(const Values& delta) const;

  /// Zero vector per key, same dimensions.
  Values zeroLike() const;

  std::vector<Key> keys() const;

  Map::const_iterator begin() const { return values_.begin(); }
  Map::const_iterator end() const { return values_.end(); }

  /// Max absolute componentwise difference over common keys; +inf if key sets differ.
  double maxAbsDiff(const Values& other) const;

 private:
  Map values_;
};

}  // namespace kdfg
