#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

#include "kdfg/factor.hpp"
#include "kdfg/key.hpp"
#include "kdfg/values.hpp"

namespace kdfg {

/// Bayes-tree node: the conditional p(frontals | separator) in square-root
/// information form  R [x_F; x_S] = d  (R upper-triangular in its frontal block),
/// plus the marginal factor on the separator that was passed to the parent.
struct Clique {
  std::vector<Key> frontals;
  std::vector<Key> separator;
  Eigen::MatrixXd R;
  Eigen::VectorXd d;
  LinearFactor marginal;
  int parent = -1;
  std::vector<int> children;
};

class BayesTree {
 public:
  const std::vector<Clique>& cliques() const { return cliques_; }
  std::vector<int> roots() const;
  int cliqueOf(const Key& key) const;
  int dim(const Key& key) const;
  const std::map<Key, int>& dims() const { return dims_; }
  std::size_t size() const { return cliques_.size(); }
  std::size_t numKeys() const { return key_to_clique_.size(); }

  /// Structural checks: frontals partition the keys, every separator is covered by
  /// the parent's keys, triangular blocks are full rank. Returns an empty string when valid.
  std::string checkInvariants() const;

  // Mutation API used by elimination and incremental updates.
  std::vector<Clique>& mutableCliques() { return cliques_; }
  void rebuildIndex();
  void setDims(std::map<Key, int> dims) { dims_ = std::move(dims); }

 private:
  std::vector<Clique> cliques_;
  std::map<Key, int> key_to_clique_;
  std::map<Key, int> dims_;
};

/// Eliminate a whitened linear graph with the given variable ordering.
/// Throws IndeterminateSystemError naming the first rank-deficient variable.
BayesTree eliminate(const GaussianFactorGraph& graph, const std::vector<Key>& ordering);

/// Back-substitution from the roots; returns the minimizer of the linear graph.
Values solve(const BayesTree& tree);

namespace detail {

/// Column dimension of every key referenced by `factors`.
std::map<Key, int> collect_dims(const std::vector<const LinearFactor*>& factors);

/// Eliminate `factors` in `ordering` and append the resulting cliques to `cliques`.
/// Returned indices refer to the appended cliques; parents/children are wired
/// among them, new roots have parent -1.
std::vector<int> eliminate_append(std::vector<Clique>& cliques, const std::vector<const LinearFactor*>& factors,
                                  const std::vector<Key>& ordering, const std::map<Key, int>& dims);

}  // namespace detail
}  // namespace kdfg
