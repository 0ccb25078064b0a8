#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nscon {

// Typed failures thrown by the library. The CLI maps these to exit codes.

struct NotStronglyConnected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an exact Filippov set would require resolving a discontinuous
// outer function fed by a discontinuous (or degenerate) inner argument.
struct NestedDiscontinuity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Divergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EdgeFnsPresent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario-file problem, annotated with source name and byte offset when known.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::string source = "", std::size_t byte = 0)
      : std::runtime_error(source.empty() ? msg : source + ": " + msg),
        source_name(std::move(source)),
        byte_offset(byte) {}
  std::string source_name;
  std::size_t byte_offset = 0;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nscon
