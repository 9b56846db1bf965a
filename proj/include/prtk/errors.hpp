#pragma once

#include <stdexcept>
#include <string>

namespace prtk {

/// Invalid argument values or violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Array shapes that do not fit together (e.g. m < 2n - 1).
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// NaN/Inf produced during an iteration.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed files on disk.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures (unreadable/unwritable paths).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prtk
