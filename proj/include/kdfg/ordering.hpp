#pragma once

#include <string>
#include <vector>

#include "kdfg/factor.hpp"
#include "kdfg/key.hpp"

namespace kdfg {

enum class OrderingType { kForward, kMinDegree };

OrderingType parse_ordering_type(const std::string& name);
std::string to_string(OrderingType type);

/// Time-major elimination order: all keys of step 0, then step 1, ... Within a
/// step: wrenches, torques, twists, twist accelerations, q'', q', q, then any
/// other kind; ties broken by entity index.
std::vector<Key> forward_ordering(const std::vector<Key>& keys);
std::vector<Key> default_ordering(const FactorGraph& graph);

/// Greedy minimum-degree ordering over the variable adjacency of `graph`, with
/// ties broken by Key order.
std::vector<Key> min_degree_ordering(const FactorGraph& graph);

std::vector<Key> make_ordering(const FactorGraph& graph, OrderingType type);

}  // namespace kdfg
