#pragma once

#include <stdexcept>
#include <string>

namespace rym {

/// Input outside an operation's domain (wrong mesh kind, nonpositive density, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf or a solver breakdown while advancing the flow.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected run configuration. Maps to CLI exit code 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rym
