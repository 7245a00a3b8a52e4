#pragma once

#include <stdexcept>
#include <string>

namespace ssle {

/// Caller violated a precondition (mismatched algebras, bad parity, bad index).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A leading coefficient that must be invertible has zero body.
class SingularInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series truncation too shallow for the requested operation.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter map evaluated at a point where it degenerates (e.g. h = 0).
class DegenerateParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ssle
