#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cantorlab {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested order or index exceeds the data that is available.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed, or the working precision was exhausted.
/// `index()` names the offending eigenvalue, coefficient or order.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A computed quantity violates an identity it must satisfy by construction.
class ConsistencyError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// A configured size cap (atoms, memory) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration; `field()` is the offending config key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cantorlab
