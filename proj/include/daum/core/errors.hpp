#pragma once

#include <stdexcept>
#include <string>

namespace daum {

/// Tensor/layout dimensions disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument is outside the operation's accepted range.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematical precondition violated (e.g. non-stationary AR(1) regime).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Object is not in a state that allows the call (e.g. unfilled snapshot buffer).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data is inconsistent (coverage gaps, malformed records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric is undefined for the given input (e.g. single-class labels).
class MetricUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace daum
