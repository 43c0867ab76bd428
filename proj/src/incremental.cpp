#include "kdfg/incremental.hpp"

#include <algorithm>

#include "kdfg/errors.hpp"

namespace kdfg {

IncrementalSolver::IncrementalSolver(FactorGraph graph, Values linearization_point, std::vector<Key> ordering)
    : graph_(std::move(graph)), theta_(std::move(linearization_point)), ordering_(std::move(ordering)) {
  for (int i = 0; i < static_cast<int>(ordering_.size()); ++i) position_.emplace(ordering_[i], i);
  linear_.resize(graph_.slots());
  graph_.forEach([&](FactorId id, const Factor& f) {
    linear_[id] = f.linearize(theta_);
    indexFactor(id);
  });
  tree_ = eliminate(linearSystem(), ordering_);
  delta_ = solve(tree_);
}

void IncrementalSolver::indexFactor(FactorId id) {
  for (const auto& k : graph_.at(id)->keys()) variable_index_[k].insert(id);
}

void IncrementalSolver::unindexFactor(FactorId id) {
  for (const auto& k : graph_.at(id)->keys()) variable_index_[k].erase(id);
}

GaussianFactorGraph IncrementalSolver::linearSystem() const {
  GaussianFactorGraph g;
  for (const auto& lf : linear_) {
    if (lf) g.push_back(*lf);
  }
  return g;
}

std::set<Key> IncrementalSolver::keysAboveThreshold(double threshold) const {
  std::set<Key> out;
  for (const auto& [k, d] : delta_) {
    if (d.size() > 0 && d.cwiseAbs().maxCoeff() > threshold) out.insert(k);
  }
  return out;
}

IncrementalSolver::UpdateResult IncrementalSolver::update(const std::vector<FactorId>& removed,
                                                          const std::vector<FactorPtr>& added,
                                                          const std::set<Key>& relin_keys) {
  // Validate before touching any state.
  for (const auto& f : added) {
    if (!f) throw Error("null factor in update");
    for (const auto& k : f->keys()) {
      if (!theta_.contains(k)) throw UnknownVariableError(k);
    }
  }
  for (FactorId id : removed) {
    if (!graph_.contains(id)) throw Error("cannot remove unknown factor " + std::to_string(id));
  }
  for (const auto& k : relin_keys) {
    if (!theta_.contains(k)) throw UnknownVariableError(k);
  }

  UpdateResult result;
  result.report.total_keys = theta_.size();
  std::set<Key> marked;

  for (FactorId id : removed) {
    const auto& keys = graph_.at(id)->keys();
    marked.insert(keys.begin(), keys.end());
    unindexFactor(id);
    graph_.remove(id);
    linear_[id].reset();
  }

  if (!relin_keys.empty()) {
    std::set<FactorId> touched;
    for (const auto& k : relin_keys) {
      theta_.at(k) += delta_.at(k);
      const auto& ids = variable_index_[k];
      touched.insert(ids.begin(), ids.end());
    }
    for (FactorId id : touched) {
      const Factor& f = *graph_.at(id);
      linear_[id] = f.linearize(theta_);
      marked.insert(f.keys().begin(), f.keys().end());
    }
    result.report.relinearized_factors = touched.size();
  }

  for (const auto& f : added) {
    const FactorId id = graph_.add(f);
    if (linear_.size() <= id) linear_.resize(id + 1);
    linear_[id] = f->linearize(theta_);
    indexFactor(id);
    marked.insert(f->keys().begin(), f->keys().end());
    result.added_ids.push_back(id);
  }

  if (marked.empty()) return result;

  // Affected top: cliques holding a marked frontal key, plus paths to the root.
  auto& cliques = tree_.mutableCliques();
  std::vector<char> in_top(cliques.size(), 0);
  for (const auto& k : marked) {
    int c = tree_.cliqueOf(k);
    while (c >= 0 && !in_top[c]) {
      in_top[c] = 1;
      c = cliques[c].parent;
    }
  }
  std::set<Key> top_keys;
  std::vector<int> orphans;
  for (int c = 0; c < static_cast<int>(cliques.size()); ++c) {
    if (!in_top[c]) continue;
    ++result.report.reeliminated_cliques;
    top_keys.insert(cliques[c].frontals.begin(), cliques[c].frontals.end());
    for (int child : cliques[c].children) {
      if (!in_top[child]) orphans.push_back(child);
    }
  }
  result.report.reeliminated_keys = top_keys.size();
  result.reeliminated = top_keys;

  // Factors entirely inside the top were consumed there; everything else is
  // already summarized by the orphans' cached marginals.
  std::set<FactorId> top_factor_ids;
  for (const auto& k : top_keys) {
    for (FactorId id : variable_index_[k]) {
      const auto& keys = graph_.at(id)->keys();
      if (std::all_of(keys.begin(), keys.end(), [&](const Key& x) { return top_keys.count(x) > 0; })) {
        top_factor_ids.insert(id);
      }
    }
  }
  std::sort(orphans.begin(), orphans.end());
  std::vector<LinearFactor> orphan_marginals;
  for (int o : orphans) {
    if (cliques[o].marginal.rows() > 0) orphan_marginals.push_back(cliques[o].marginal);
  }
  std::vector<const LinearFactor*> factors;
  for (FactorId id : top_factor_ids) factors.push_back(&*linear_[id]);
  for (const auto& m : orphan_marginals) factors.push_back(&m);

  std::vector<Key> top_order(top_keys.begin(), top_keys.end());
  std::sort(top_order.begin(), top_order.end(),
            [&](const Key& a, const Key& b) { return position_.at(a) < position_.at(b); });

  // Keep untouched cliques (compacted), then append the re-eliminated top.
  std::vector<int> remap(cliques.size(), -1);
  std::vector<Clique> next;
  next.reserve(cliques.size());
  for (int c = 0; c < static_cast<int>(cliques.size()); ++c) {
    if (in_top[c]) continue;
    remap[c] = static_cast<int>(next.size());
    next.push_back(std::move(cliques[c]));
  }
  for (Clique& cl : next) {
    if (cl.parent >= 0) cl.parent = remap[cl.parent];  // -1 for orphans, fixed below
    std::vector<int> kids;
    for (int ch : cl.children) kids.push_back(remap[ch]);
    cl.children = std::move(kids);
  }
  const std::size_t first_new = next.size();
  const auto& dims = tree_.dims();
  detail::eliminate_append(next, factors, top_order, dims);

  std::map<Key, int> new_owner;
  for (std::size_t c = first_new; c < next.size(); ++c) {
    for (const auto& k : next[c].frontals) new_owner[k] = static_cast<int>(c);
  }
  for (int o : orphans) {
    Clique& oc = next[remap[o]];
    const Key first = *std::min_element(oc.separator.begin(), oc.separator.end(), [&](const Key& a, const Key& b) {
      return position_.at(a) < position_.at(b);
    });
    const int parent = new_owner.at(first);
    oc.parent = parent;
    next[parent].children.push_back(remap[o]);
  }
  cliques = std::move(next);
  tree_.rebuildIndex();
  delta_ = solve(tree_);
  return result;
}

}  // namespace kdfg
