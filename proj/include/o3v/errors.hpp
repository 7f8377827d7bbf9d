#pragma once

#include <stdexcept>
#include <string>

namespace o3v {

/// Non-finite input to a scalar kernel.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not defined for the selected nonlinearity (e.g. F2 in CSH mode).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adaptive integrator could not continue (step underflow, non-finite state).
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double last_r)
      : std::runtime_error(what), last_r_(last_r) {}
  double last_r() const noexcept { return last_r_; }

 private:
  double last_r_;
};

/// Shooting bracket whose endpoints have the same tail behaviour.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver failed; carries the best diagnostic value reached.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double best)
      : std::runtime_error(what), best_(best) {}
  double best() const noexcept { return best_; }

 private:
  double best_;
};

class MonotonicityFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ball/vortex geometry violates a precondition (overlap, outside domain).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weight of a generalized eigenproblem is not of one sign.
class WeightIndefinite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sweep could not start (the first solve failed).
class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration rejected by schema validation. `pointer()` is a JSON pointer.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, std::string pointer)
      : std::invalid_argument(what + " at " + (pointer.empty() ? "/" : pointer)),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace o3v
