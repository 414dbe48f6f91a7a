#pragma once

#include <stdexcept>
#include <string>

namespace vsdag {

/// Companion-matrix eigen decomposition did not converge.
class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A transfer operator was evaluated exactly on one of its poles.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation's documented precondition does not hold for the given input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The adaptation produced a non-finite estimate or one whose norm exceeded
/// the divergence bound. Carries the step index at which it happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Malformed or inconsistent configuration. `line` is 0 when not tied to a
/// particular line of a config file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace vsdag
