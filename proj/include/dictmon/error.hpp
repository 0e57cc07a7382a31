#ifndef DICTMON_ERROR_HPP
#define DICTMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dictmon {

// Error taxonomy. The CLI maps each family to an exit code:
// ConfigError -> 2, DataError -> 3, NumericError -> 4.

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Anything wrong with input data: unreadable files, malformed records,
/// corrupt dictionary files, contract violations on supplied series.
class DataError : public Error {
public:
  using Error::Error;
};

class IoError : public DataError {
public:
  using DataError::DataError;
};

class ParseError : public DataError {
public:
  using DataError::DataError;
};

class FormatError : public DataError {
public:
  using DataError::DataError;
};

class NumericError : public Error {
public:
  using Error::Error;
};

} // namespace dictmon

#endif
