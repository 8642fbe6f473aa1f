#pragma once

#include <stdexcept>
#include <string>

namespace simpx {

// Each category maps to a distinct diagnostic prefix in the CLI.

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File content does not follow the declared format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of volumes, images or ray fans do not agree.
class DimsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter value is outside its valid domain.
class ValueError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Solver hit a non-finite loss.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simpx
