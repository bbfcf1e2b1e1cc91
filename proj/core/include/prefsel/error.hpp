#pragma once

#include <stdexcept>
#include <string>

namespace prefsel {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input: bad files, unknown ids, invalid parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A score outside its criterion scale.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// The model has no feasible solution, e.g. the preference statements are
/// inconsistent for a mode that requires a compatible value function.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A configured budget (nodes, pivots, cuts) was exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The simplex engine could not reach a certified answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace prefsel
