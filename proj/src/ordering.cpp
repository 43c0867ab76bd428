#include "kdfg/ordering.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kdfg/errors.hpp"

namespace kdfg {

OrderingType parse_ordering_type(const std::string& name) {
  if (name == "forward") return OrderingType::kForward;
  if (name == "mindegree") return OrderingType::kMinDegree;
  throw Error("unknown ordering '" + name + "' (expected forward or mindegree)");
}

std::string to_string(OrderingType type) { return type == OrderingType::kForward ? "forward" : "mindegree"; }

namespace {

int symbol_rank(char s) {
  static constexpr char kOrder[] = {sym::kWrench, sym::kTorque, sym::kTwist, sym::kTwistAccel,
                                    sym::kJointAccel, sym::kJointVel, sym::kJointAngle};
  for (int i = 0; i < 7; ++i) {
    if (kOrder[i] == s) return i;
  }
  return 7 + static_cast<unsigned char>(s);
}

}  // namespace

std::vector<Key> forward_ordering(const std::vector<Key>& keys) {
  std::vector<Key> out = keys;
  std::sort(out.begin(), out.end(), [](const Key& a, const Key& b) {
    if (a.time != b.time) return a.time < b.time;
    const int ra = symbol_rank(a.symbol), rb = symbol_rank(b.symbol);
    if (ra != rb) return ra < rb;
    return a.entity < b.entity;
  });
  return out;
}

std::vector<Key> default_ordering(const FactorGraph& graph) { return forward_ordering(graph.keys()); }

std::vector<Key> min_degree_ordering(const FactorGraph& graph) {
  std::map<Key, std::set<Key>> adj;
  graph.forEach([&](FactorId, const Factor& f) {
    for (const auto& a : f.keys()) {
      auto& s = adj[a];
      for (const auto& b : f.keys()) {
        if (!(a == b)) s.insert(b);
      }
    }
  });
  std::vector<Key> order;
  order.reserve(adj.size());
  while (!adj.empty()) {
    auto best = adj.begin();
    for (auto it = adj.begin(); it != adj.end(); ++it) {
      if (it->second.size() < best->second.size()) best = it;
    }
    const Key v = best->first;
    const std::set<Key> nbrs = std::move(best->second);
    adj.erase(best);
    for (const auto& a : nbrs) {
      auto& s = adj[a];
      s.erase(v);
      for (const auto& b : nbrs) {
        if (!(a == b)) s.insert(b);
      }
    }
    order.push_back(v);
  }
  return order;
}

std::vector<Key> make_ordering(const FactorGraph& graph, OrderingType type) {
  return type == OrderingType::kForward ? default_ordering(graph) : min_degree_ordering(graph);
}

}  // namespace kdfg
