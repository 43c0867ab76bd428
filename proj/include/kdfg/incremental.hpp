#pragma once

#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "kdfg/bayes_tree.hpp"
#include "kdfg/factor.hpp"
#include "kdfg/values.hpp"

namespace kdfg {

struct AffectedReport {
  std::size_t reeliminated_keys = 0;
  std::size_t reeliminated_cliques = 0;
  std::size_t relinearized_factors = 0;
  std::size_t total_keys = 0;
};

/// Bayes-tree solver session that supports factor swaps and partial
/// relinearization. Only the cliques touched by a change, plus their paths to
/// the root, are re-eliminated; the rest of the tree is reattached unchanged
/// through the separator marginals cached at elimination time.
class IncrementalSolver {
 public:
  IncrementalSolver(FactorGraph graph, Values linearization_point, std::vector<Key> ordering);

  struct UpdateResult {
    AffectedReport report;
    std::vector<FactorId> added_ids;
    std::set<Key> reeliminated;  // frontal keys of every re-eliminated clique
  };

  /// Remove factors, add factors, relinearize `relin_keys` (theta += delta for
  /// those keys, then every factor touching them is relinearized), re-eliminate
  /// the affected top of the tree and back-substitute.
  UpdateResult update(const std::vector<FactorId>& removed, const std::vector<FactorPtr>& added,
                      const std::set<Key>& relin_keys = {});

  /// Keys whose current delta has a component larger than `threshold` in magnitude.
  std::set<Key> keysAboveThreshold(double threshold) const;

  const FactorGraph& graph() const { return graph_; }
  const Values& linearizationPoint() const { return theta_; }
  const Values& delta() const { return delta_; }
  Values estimate() const { return theta_.retract(delta_); }
  const BayesTree& tree() const { return tree_; }
  const std::vector<Key>& ordering() const { return ordering_; }

  /// The cached linearization of every live factor (whitened, at theta).
  GaussianFactorGraph linearSystem() const;

 private:
  void indexFactor(FactorId id);
  void unindexFactor(FactorId id);

  FactorGraph graph_;
  Values theta_;
  Values delta_;
  std::vector<Key> ordering_;
  std::unordered_map<Key, int> position_;
  std::vector<std::optional<LinearFactor>> linear_;
  std::map<Key, std::set<FactorId>> variable_index_;
  BayesTree tree_;
};

}  // namespace kdfg
