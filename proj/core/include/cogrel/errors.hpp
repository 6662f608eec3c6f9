#pragma once

#include <stdexcept>
#include <string>

namespace cogrel {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: unreadable files, bad fields, inconsistent records.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input that violates a precondition of the operation
// (non-finite state, empty signal, bad option value).
struct DomainError : Error {
  using Error::Error;
};

// Not enough data to run the requested operation (too few self-reports,
// too short a window, no samples).
struct InsufficientDataError : Error {
  using Error::Error;
};

// Sample set with (numerically) zero spread where a distribution is needed.
struct DegenerateDistributionError : Error {
  using Error::Error;
};

// Raw event stream problems, each with its own type so callers and tests can
// tell them apart without string matching.
struct UnpairedEventError : ParseError {
  using ParseError::ParseError;
};
struct OverlappingIntervalError : ParseError {
  using ParseError::ParseError;
};
struct OutOfOrderError : ParseError {
  using ParseError::ParseError;
};
struct ReportCollisionError : ParseError {
  using ParseError::ParseError;
};

}  // namespace cogrel
