#pragma once

#include <stdexcept>
#include <string>

namespace pixelrl {

/// Caller passed arguments that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Bad configuration (unknown keys, missing required keys, incompatible architecture).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A NaN/Inf showed up in activations, losses or gradients.
class NumericFault : public std::runtime_error {
 public:
  explicit NumericFault(const std::string& what) : std::runtime_error(what) {}
};

/// Operation called in a state where it is not allowed (e.g. stepping a finished episode).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace pixelrl
