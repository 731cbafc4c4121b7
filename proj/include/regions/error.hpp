#pragma once

#include <stdexcept>
#include <string>

namespace regions {

// Malformed arguments: wrong shapes, zero directions, invalid parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Files that cannot be read, parsed or validated.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced during evaluation or training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regions
