#pragma once

#include <stdexcept>
#include <string>

namespace rvb {

/// Bad input: malformed parameters, violated preconditions, inconsistent data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Refusal to run a computation whose size exceeds a hard resource guard.
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rvb
