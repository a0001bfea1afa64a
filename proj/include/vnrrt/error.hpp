#pragma once

#include <stdexcept>
#include <string>

namespace vnrrt {

// Base class for every domain error raised by the library. The CLI maps these
// to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class InsufficientFreeSpace : public Error {
 public:
  using Error::Error;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

class AllMasked : public Error {
 public:
  using Error::Error;
};

class NotSamplable : public Error {
 public:
  using Error::Error;
};

class NoValidParent : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class GuidanceFileMissing : public IoError {
 public:
  using IoError::IoError;
};

/// Malformed map/raster/CSV input. Line and column are 1-based; 0 means the
/// position is not meaningful for the format (binary rasters).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what
                       : what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace vnrrt
