#pragma once

#include <stdexcept>
#include <string>

namespace padicforms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands at different precisions, or a precision too small or too large
/// for the requested computation.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual or JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's mathematical domain (non-unit where a
/// unit is required, unsupported degree, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A check that the theory guarantees failed. Always a bug or a corrupted
/// certificate, never a property of the input form.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A configured resource limit (node budget, oracle memory) was exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace padicforms
