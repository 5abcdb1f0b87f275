#pragma once

#include <stdexcept>
#include <string>

namespace ponsim {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Config file could not be read as structured text.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

/// Config parsed but violates a documented invariant.
struct ValidationError : ConfigError {
  using ConfigError::ConfigError;
};

struct PastEventError : std::logic_error {
  using std::logic_error::logic_error;
};

struct GrantOverflow : std::logic_error {
  using std::logic_error::logic_error;
};

struct NoChannelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IncompleteGroup : std::logic_error {
  using std::logic_error::logic_error;
};

struct EmptyTable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptySamples : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientReplications : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A protocol invariant tripped mid-run. Carries the simulated time.
struct InvariantViolation : std::runtime_error {
  InvariantViolation(const std::string& what, long long at_ns)
      : std::runtime_error(what), at_ns(at_ns) {}
  long long at_ns;
};

}  // namespace ponsim
