#pragma once

#include <stdexcept>
#include <string>

namespace wallsense {

/// Raised when an input violates a documented invariant. `field_path` names the
/// offending field using dotted JSON-style paths (e.g. "placement.tx_m").
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field_path, const std::string& message)
      : std::invalid_argument(field_path.empty() ? message : field_path + ": " + message),
        field_path_(std::move(field_path)),
        message_(message) {}

  const std::string& field_path() const noexcept { return field_path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_path_;
  std::string message_;
};

/// Malformed input text (JSON, CSV). `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Arguments outside a function's mathematical domain (nonpositive distances etc).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace wallsense
