#pragma once

#include <stdexcept>
#include <string>

namespace memgap {

/// Invalid experiment, model, or scheme configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time that must sit on a grid node does not. Never silently rounded.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside a path, segment, or function domain.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model functional produced a non-finite value.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace memgap
