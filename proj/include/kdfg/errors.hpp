#pragma once

#include <stdexcept>
#include <string>

#include "kdfg/key.hpp"

namespace kdfg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownVariableError : public Error {
 public:
  explicit UnknownVariableError(const Key& key)
      : Error("unknown variable " + to_string(key)), key_(key) {}
  const Key& key() const { return key_; }

 private:
  Key key_;
};

class IndeterminateSystemError : public Error {
 public:
  explicit IndeterminateSystemError(const Key& key)
      : Error("indeterminate system at variable " + to_string(key)), key_(key) {}
  const Key& key() const { return key_; }

 private:
  Key key_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Schema or value error in a user document. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, int line, const std::string& message)
      : Error(format(field, line, message)), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::string out = field.empty() ? message : field + ": " + message;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out;
  }
  std::string field_;
  int line_;
};

}  // namespace kdfg
