#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace kdfg {

/// Variable identity: a kind tag, a link/joint index and a time index.
/// Ordered time-major, then by entity, then by symbol.
struct Key {
  char symbol = 'x';
  std::uint32_t entity = 0;
  std::uint32_t time = 0;

  friend constexpr auto operator<=>(const Key& a, const Key& b) {
    if (auto c = a.time <=> b.time; c != 0) return c;
    if (auto c = a.entity <=> b.entity; c != 0) return c;
    return a.symbol <=> b.symbol;
  }
  friend constexpr bool operator==(const Key&, const Key&) = default;
};

inline std::string to_string(const Key& k) {
  return std::string(1, k.symbol) + std::to_string(k.entity) + "_" + std::to_string(k.time);
}

// Kind tags used by the planner.
namespace sym {
inline constexpr char kJointAngle = 'q';
inline constexpr char kJointVel = 'v';
inline constexpr char kJointAccel = 'a';
inline constexpr char kTwist = 'V';
inline constexpr char kTwistAccel = 'A';
inline constexpr char kWrench = 'F';
inline constexpr char kTorque = 'T';
}  // namespace sym

inline Key Q(std::uint32_t j, std::uint32_t t) { return {sym::kJointAngle, j, t}; }
inline Key DQ(std::uint32_t j, std::uint32_t t) { return {sym::kJointVel, j, t}; }
inline Key DDQ(std::uint32_t j, std::uint32_t t) { return {sym::kJointAccel, j, t}; }
inline Key TwistKey(std::uint32_t j, std::uint32_t t) { return {sym::kTwist, j, t}; }
inline Key TwistAccelKey(std::uint32_t j, std::uint32_t t) { return {sym::kTwistAccel, j, t}; }
inline Key WrenchKey(std::uint32_t j, std::uint32_t t) { return {sym::kWrench, j, t}; }
inline Key TorqueKey(std::uint32_t j, std::uint32_t t) { return {sym::kTorque, j, t}; }

}  // namespace kdfg

template <>
struct std::hash<kdfg::Key> {
  std::size_t operator()(const kdfg::Key& k) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(k.time) << 40) ^
                      (static_cast<std::uint64_t>(k.entity) << 8) ^ static_cast<unsigned char>(k.symbol);
    return std::hash<std::uint64_t>{}(h);
  }
};
