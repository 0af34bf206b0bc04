#include "evcharge/error.hpp"

namespace evcharge {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "validation failed";
  for (const auto& p : problems) {
    out += "\n  - ";
    out += p;
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& field,
                       const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": field '" + field + "': " + what),
      source_(source),
      line_(line),
      field_(field) {}

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace evcharge
