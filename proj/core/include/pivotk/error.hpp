#pragma once

#include <stdexcept>
#include <string>

namespace pivotk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or configuration violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The resolved bundle list is shorter than the decode threshold, so no
/// bounty can be paid.
class DecodeNotReached : public Error {
 public:
  using Error::Error;
};

/// A pathwise or property check failed.
class PropertyViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pivotk
