#pragma once

#include <stdexcept>
#include <string>

namespace kubota {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or invalid dimensions (vector length, subspace shape).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad body specification, non-unit atoms, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an estimator or check was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The body variant has no closed-form gauge; use support-based paths.
class UnsupportedGauge : public Error {
 public:
  using Error::Error;
};

/// A combinatorial or dimensional cap was exceeded. Never silently approximated.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, int k, std::string method)
      : Error(what), k_(k), method_(std::move(method)) {}

  int k() const noexcept { return k_; }
  const std::string& method() const noexcept { return method_; }

 private:
  int k_;
  std::string method_;
};

/// An oracle returned a value that a valid body cannot produce.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace kubota
