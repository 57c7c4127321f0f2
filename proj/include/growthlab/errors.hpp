#pragma once

#include <stdexcept>
#include <string>

namespace growthlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument lies outside the domain of the map or function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach the requested accuracy.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// The map violates a structural requirement (monotonicity, endpoint fixing, orbit escape).
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// Family constructor received parameters outside the admissible range.
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// Operation called with inconsistent arguments.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A family could not be assembled from an otherwise valid schedule.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace growthlab
