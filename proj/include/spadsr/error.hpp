#pragma once

#include <stdexcept>
#include <string>

namespace spadsr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File container / image decoding failures.
class FormatError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DtypeMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Shapes that do not satisfy an operation's divisibility or matching rules.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Out-of-range parameters (ppp <= 0, T < 3, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Training diverged (NaN/Inf loss).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spadsr
