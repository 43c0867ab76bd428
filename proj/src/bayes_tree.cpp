#include "kdfg/bayes_tree.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <unordered_map>

#include "kdfg/errors.hpp"

namespace kdfg {

std::vector<int> BayesTree::roots() const {
  std::vector<int> r;
  for (int i = 0; i < static_cast<int>(cliques_.size()); ++i) {
    if (cliques_[i].parent < 0) r.push_back(i);
  }
  return r;
}

int BayesTree::cliqueOf(const Key& key) const {
  auto it = key_to_clique_.find(key);
  if (it == key_to_clique_.end()) throw UnknownVariableError(key);
  return it->second;
}

int BayesTree::dim(const Key& key) const {
  auto it = dims_.find(key);
  if (it == dims_.end()) throw UnknownVariableError(key);
  return it->second;
}

void BayesTree::rebuildIndex() {
  key_to_clique_.clear();
  for (int i = 0; i < static_cast<int>(cliques_.size()); ++i) {
    for (const auto& k : cliques_[i].frontals) key_to_clique_[k] = i;
  }
}

std::string BayesTree::checkInvariants() const {
  std::map<Key, int> seen;
  for (int i = 0; i < static_cast<int>(cliques_.size()); ++i) {
    const Clique& c = cliques_[i];
    for (const auto& k : c.frontals) {
      if (!seen.emplace(k, i).second) return "key " + to_string(k) + " is frontal in two cliques";
    }
    if (c.parent >= 0) {
      const Clique& p = cliques_[c.parent];
      for (const auto& s : c.separator) {
        const bool in_parent = std::find(p.frontals.begin(), p.frontals.end(), s) != p.frontals.end() ||
                               std::find(p.separator.begin(), p.separator.end(), s) != p.separator.end();
        if (!in_parent) return "separator key " + to_string(s) + " not covered by parent clique";
      }
      if (std::find(p.children.begin(), p.children.end(), i) == p.children.end()) {
        return "clique missing from its parent's children";
      }
    } else if (!c.separator.empty()) {
      return "root clique has a non-empty separator";
    }
    int nf = 0;
    for (const auto& k : c.frontals) nf += dim(k);
    if (c.R.rows() != nf) return "conditional has wrong row count";
    for (int r = 0; r < nf; ++r) {
      if (c.R(r, r) == 0.0) return "conditional is rank deficient";
    }
  }
  if (seen.size() != dims_.size()) return "frontal sets do not cover all keys";
  return {};
}

namespace detail {

std::map<Key, int> collect_dims(const std::vector<const LinearFactor*>& factors) {
  std::map<Key, int> dims;
  for (const LinearFactor* f : factors) {
    for (std::size_t k = 0; k < f->keys.size(); ++k) {
      const int d = static_cast<int>(f->blocks[k].cols());
      auto [it, inserted] = dims.emplace(f->keys[k], d);
      if (!inserted && it->second != d) throw DimensionError("inconsistent dimension for " + to_string(f->keys[k]));
    }
  }
  return dims;
}

std::vector<int> eliminate_append(std::vector<Clique>& cliques, const std::vector<const LinearFactor*>& factors,
                                  const std::vector<Key>& ordering, const std::map<Key, int>& dims) {
  const int n = static_cast<int>(ordering.size());
  std::unordered_map<Key, int> pos;
  pos.reserve(ordering.size());
  for (int i = 0; i < n; ++i) {
    if (!pos.emplace(ordering[i], i).second) throw Error("ordering lists " + to_string(ordering[i]) + " twice");
  }

  // Assign each factor to its earliest-eliminated variable.
  std::vector<std::vector<int>> assigned(n);
  std::vector<std::vector<int>> factor_pos(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    auto& fp = factor_pos[f];
    for (const auto& k : factors[f]->keys) {
      auto it = pos.find(k);
      if (it == pos.end()) throw UnknownVariableError(k);
      fp.push_back(it->second);
    }
    if (fp.empty()) continue;
    std::sort(fp.begin(), fp.end());
    fp.erase(std::unique(fp.begin(), fp.end()), fp.end());
    assigned[fp.front()].push_back(static_cast<int>(f));
  }

  // Symbolic elimination: separator of each variable and the elimination tree.
  std::vector<std::vector<int>> sep(n);
  std::vector<std::vector<int>> etree_children(n);
  for (int v = 0; v < n; ++v) {
    std::vector<int> s;
    for (int f : assigned[v]) s.insert(s.end(), factor_pos[f].begin() + 1, factor_pos[f].end());
    for (int c : etree_children[v]) {
      for (int x : sep[c]) {
        if (x != v) s.push_back(x);
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sep[v] = std::move(s);
    if (!sep[v].empty()) etree_children[sep[v].front()].push_back(v);
  }

  // Group variables into cliques, walking from the last-eliminated variable.
  struct Proto {
    std::vector<int> frontals;  // ascending positions
    std::vector<int> separator;
    int parent = -1;
  };
  std::vector<Proto> protos;
  std::vector<int> clique_of(n, -1);
  for (int v = n - 1; v >= 0; --v) {
    const auto& s = sep[v];
    if (!s.empty()) {
      const int p = s.front();
      const int c = clique_of[p];
      Proto& pc = protos[c];
      if (pc.frontals.front() == p && s.size() == pc.frontals.size() + pc.separator.size()) {
        pc.frontals.insert(pc.frontals.begin(), v);
        clique_of[v] = c;
        continue;
      }
      protos.push_back({{v}, s, c});
    } else {
      protos.push_back({{v}, {}, -1});
    }
    clique_of[v] = static_cast<int>(protos.size()) - 1;
  }

  // Factors handled by each clique.
  std::vector<std::vector<int>> clique_factors(protos.size());
  for (int v = 0; v < n; ++v) {
    for (int f : assigned[v]) clique_factors[clique_of[v]].push_back(f);
  }

  const int base = static_cast<int>(cliques.size());
  cliques.resize(base + protos.size());
  std::vector<int> created(protos.size());
  for (std::size_t c = 0; c < protos.size(); ++c) {
    created[c] = base + static_cast<int>(c);
    Clique& cl = cliques[base + c];
    for (int v : protos[c].frontals) cl.frontals.push_back(ordering[v]);
    for (int v : protos[c].separator) cl.separator.push_back(ordering[v]);
    cl.parent = protos[c].parent >= 0 ? base + protos[c].parent : -1;
    if (protos[c].parent >= 0) cliques[base + protos[c].parent].children.push_back(base + static_cast<int>(c));
  }

  // Numerical elimination in post-order (children first). Protos were created
  // parents-first, so reverse creation order visits every child before its parent.
  for (int c = static_cast<int>(protos.size()) - 1; c >= 0; --c) {
    Clique& cl = cliques[base + c];
    std::vector<int> cpos = protos[c].frontals;
    cpos.insert(cpos.end(), protos[c].separator.begin(), protos[c].separator.end());
    std::vector<int> offset(cpos.size() + 1, 0);
    for (std::size_t i = 0; i < cpos.size(); ++i) offset[i + 1] = offset[i] + dims.at(ordering[cpos[i]]);
    const int ncols = offset.back();
    int nf = 0;
    for (int v : protos[c].frontals) nf += dims.at(ordering[v]);

    auto column_of = [&](const Key& k) {
      const int p = pos.at(k);
      auto it = std::lower_bound(cpos.begin(), cpos.end(), p);
      return offset[it - cpos.begin()];
    };

    int nrows = 0;
    for (int f : clique_factors[c]) nrows += factors[f]->rows();
    for (int child : cl.children) nrows += cliques[child].marginal.rows();

    Eigen::MatrixXd Ab = Eigen::MatrixXd::Zero(nrows, ncols + 1);
    int row = 0;
    auto stack = [&](const LinearFactor& lf) {
      for (std::size_t k = 0; k < lf.keys.size(); ++k) {
        Ab.block(row, column_of(lf.keys[k]), lf.rows(), lf.blocks[k].cols()) += lf.blocks[k];
      }
      Ab.block(row, ncols, lf.rows(), 1) = lf.rhs;
      row += lf.rows();
    };
    for (int f : clique_factors[c]) stack(*factors[f]);
    for (int child : cl.children) stack(cliques[child].marginal);

    // Column scale for the rank test.
    Eigen::VectorXd colnorm = Ab.leftCols(nf).colwise().norm();

    Eigen::MatrixXd R;
    if (nrows > 0) {
      Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(Ab);
      R = Ab.topRows(std::min(nrows, ncols + 1)).triangularView<Eigen::Upper>();
    }
    auto key_at_column = [&](int col) {
      auto it = std::upper_bound(offset.begin(), offset.end(), col);
      return ordering[cpos[(it - offset.begin()) - 1]];
    };
    for (int i = 0; i < nf; ++i) {
      if (i >= R.rows() || std::abs(R(i, i)) <= 1e-10 * (1.0 + colnorm(i))) {
        throw IndeterminateSystemError(key_at_column(i));
      }
    }
    cl.R = R.block(0, 0, nf, ncols);
    cl.d = R.block(0, ncols, nf, 1);

    LinearFactor& m = cl.marginal;
    m.keys = cl.separator;
    m.blocks.clear();
    const int mrows = std::max(0, std::min(nrows, ncols) - nf);
    if (mrows > 0 && !cl.separator.empty()) {
      for (std::size_t i = protos[c].frontals.size(); i < cpos.size(); ++i) {
        m.blocks.push_back(R.block(nf, offset[i], mrows, offset[i + 1] - offset[i]));
      }
      m.rhs = R.block(nf, ncols, mrows, 1);
    } else {
      m.keys.clear();
      m.rhs.resize(0);
    }
  }
  return created;
}

}  // namespace detail

BayesTree eliminate(const GaussianFactorGraph& graph, const std::vector<Key>& ordering) {
  std::vector<const LinearFactor*> fs;
  fs.reserve(graph.size());
  for (const auto& f : graph) fs.push_back(&f);
  BayesTree tree;
  auto dims = detail::collect_dims(fs);
  for (const auto& k : ordering) {
    if (!dims.count(k)) throw IndeterminateSystemError(k);
  }
  if (ordering.size() != dims.size()) {
    for (const auto& [k, d] : dims) {
      if (std::find(ordering.begin(), ordering.end(), k) == ordering.end()) throw UnknownVariableError(k);
    }
  }
  detail::eliminate_append(tree.mutableCliques(), fs, ordering, dims);
  tree.setDims(std::move(dims));
  tree.rebuildIndex();
  return tree;
}

Values solve(const BayesTree& tree) {
  Values delta;
  std::vector<int> stack = tree.roots();
  std::reverse(stack.begin(), stack.end());
  const auto& cliques = tree.cliques();
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const Clique& cl = cliques[c];
    const int nf = static_cast<int>(cl.R.rows());
    Eigen::VectorXd rhs = cl.d;
    int col = nf;
    for (const auto& s : cl.separator) {
      const Eigen::VectorXd& xs = delta.at(s);
      rhs.noalias() -= cl.R.middleCols(col, xs.size()) * xs;
      col += static_cast<int>(xs.size());
    }
    const Eigen::VectorXd xf = cl.R.leftCols(nf).triangularView<Eigen::Upper>().solve(rhs);
    int off = 0;
    for (const auto& k : cl.frontals) {
      const int d = tree.dim(k);
      delta.insert(k, xf.segment(off, d));
      off += d;
    }
    for (auto it = cl.children.rbegin(); it != cl.children.rend(); ++it) stack.push_back(*it);
  }
  return delta;
}

}  // namespace kdfg
