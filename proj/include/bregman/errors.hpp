#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bregman {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of a cost function (e.g. a non-positive
/// component under negative entropy). Carries the offending component
/// and, when raised during classification, the dataset instance.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& what,
                       std::optional<std::size_t> component = std::nullopt,
                       std::optional<std::size_t> instance = std::nullopt)
      : Error(what), component_(component), instance_(instance) {}

  std::optional<std::size_t> component() const noexcept { return component_; }
  std::optional<std::size_t> instance() const noexcept { return instance_; }

private:
  std::optional<std::size_t> component_;
  std::optional<std::size_t> instance_;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public DimensionError {
public:
  using DimensionError::DimensionError;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class UnsupportedCost : public Error {
public:
  using Error::Error;
};

class ZeroGradient : public Error {
public:
  using Error::Error;
};

class ZeroVector : public Error {
public:
  using Error::Error;
};

/// Malformed input file; row and column are zero-based, data rows counted
/// after the header.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::optional<std::size_t> row = std::nullopt,
             std::optional<std::size_t> column = std::nullopt)
      : Error(what), row_(row), column_(column) {}

  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class SpecError : public Error {
public:
  using Error::Error;
};

} // namespace bregman
