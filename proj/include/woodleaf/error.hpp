#pragma once

#include <stdexcept>
#include <string>

namespace woodleaf {

/// Base error. The subclasses mirror the CLI failure classes:
/// ConfigError -> exit 2, IoError/ParseError -> exit 3, NumericError -> exit 4.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter combinations, out-of-range arguments, bad preconditions.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Missing or unwritable files, unsupported formats.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Malformed file contents. Messages carry the offending line number.
class ParseError : public IoError {
  public:
    using IoError::IoError;
};

/// Convergence failures and other numeric breakdowns.
class NumericError : public Error {
  public:
    using Error::Error;
};

} // namespace woodleaf
