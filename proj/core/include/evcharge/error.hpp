#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evcharge {

// Malformed input that could not be parsed at all.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& field,
             const std::string& what);

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  int line_;
  std::string field_;
};

// Parsed input that breaks one or more model invariants.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Caller handed us something structurally wrong (unknown ids, bad sizes).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The simulation reached a state the model forbids (e.g. a battery drained mid-leg).
class ModelViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evcharge
