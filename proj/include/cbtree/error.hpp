#pragma once

#include <stdexcept>

namespace cbtree {

/// Thrown when a request exceeds a depth, enumeration or count cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cbtree
