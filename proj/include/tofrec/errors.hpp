#pragma once

#include <stdexcept>

namespace tofrec {

/// Malformed input text (config, CSV, matrix files). Distinct from
/// std::invalid_argument so the CLI can map parse and validation failures to
/// different exit codes.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure to open, read or write a file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tofrec
