#pragma once

#include <stdexcept>
#include <string>

namespace qpd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. p outside [0, 1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical integral could not be evaluated.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A computed state broke a structural invariant (trace, Hermiticity, positivity).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A dense linear-algebra routine did not converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A matrix does not have the sparsity pattern an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpd
