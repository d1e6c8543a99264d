#pragma once

#include <stdexcept>
#include <string>

namespace brwre {

/// Structurally malformed offspring or environment law (non-normalised pmf,
/// negative weight, ...). The message names the offending component.
class LawError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The law is well formed but violates an assumption an operation needs
/// (e.g. a zero mean met by the polymer recursion).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace brwre
