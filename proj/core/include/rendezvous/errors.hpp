#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdv {

/// Base class for every error raised by the rendezvous library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query outside the domain of a path, profile or integral table.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value)
      : Error(what + " (value " + std::to_string(value) + ")"), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Invalid or unsupported configuration: bad prior, unsupported basis, bad scenario field.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string field = {})
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite or otherwise unusable data; `index` points at the offending record.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t index)
      : Error(what + " at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Precondition violated by a caller-supplied argument (negative duration, speed above limit).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The OCP solver ran out of iterations before meeting its tolerances.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdv
