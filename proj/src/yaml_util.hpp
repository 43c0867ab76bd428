#pragma once

// Small helpers for schema-checked YAML reading with line numbers in errors.

#include <yaml-cpp/yaml.h>

#include <Eigen/Core>

#include <initializer_list>
#include <set>
#include <string>

#include "kdfg/errors.hpp"

namespace kdfg::yaml {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void check_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) throw ConfigError(path, line_of(n), "expected a mapping");
}

inline void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  check_map(n, path);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError(join(path, key), line_of(kv.first), "unknown key");
  }
}

inline YAML::Node require(const YAML::Node& n, const std::string& path, const char* key) {
  check_map(n, path);
  YAML::Node v = n[key];
  if (!v) throw ConfigError(join(path, key), line_of(n), "missing required field");
  return v;
}

inline double as_double(const YAML::Node& n, const std::string& field) {
  try {
    if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected a number");
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(n), "expected a number");
  }
}

inline int as_int(const YAML::Node& n, const std::string& field) {
  try {
    if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected an integer");
    return n.as<int>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(n), "expected an integer");
  }
}

inline bool as_bool(const YAML::Node& n, const std::string& field) {
  try {
    if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected true or false");
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(n), "expected true or false");
  }
}

inline std::string as_string(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected a string");
  return n.as<std::string>();
}

/// Sequence of numbers; `expected` < 0 accepts any length.
inline Eigen::VectorXd as_vector(const YAML::Node& n, const std::string& field, int expected = -1) {
  if (!n.IsSequence()) throw ConfigError(field, line_of(n), "expected a list of numbers");
  if (expected >= 0 && static_cast<int>(n.size()) != expected) {
    throw ConfigError(field, line_of(n),
                      "expected " + std::to_string(expected) + " values, got " + std::to_string(n.size()));
  }
  Eigen::VectorXd v(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<int>(i)) = as_double(n[i], field);
  if (!v.allFinite()) throw ConfigError(field, line_of(n), "values must be finite");
  return v;
}

inline YAML::Node load_text(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(what, e.mark.line + 1, e.msg);
  }
}

}  // namespace kdfg::yaml
