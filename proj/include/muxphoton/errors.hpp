#pragma once

#include <stdexcept>
#include <string>

namespace muxphoton {

/// Thrown when a model parameter violates its documented range.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when an estimator or ratio has a zero denominator.
class UndefinedValueError : public std::domain_error {
 public:
  explicit UndefinedValueError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace muxphoton
