#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where the quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent arguments (dimension mismatch, bad enum pairing).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated at a coincident pair.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The operation is not defined for this kernel or model.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// A quantity is infinite (non-integrable singularity, non-decaying tail).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rieszlab
