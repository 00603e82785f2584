#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bdscreen {

/// One field-level problem found while validating a record.
struct Violation {
  std::string feature;
  std::string value;    // offending value as text ("" when missing)
  std::string message;
  std::size_t row = 0;  // 1-based data row for CSV input, 0 otherwise
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace bdscreen
