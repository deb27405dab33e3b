#pragma once

#include <stdexcept>
#include <string>

namespace steer {

/// Base class for all steerlab failures. The code maps onto the CLI exit
/// status: 1 usage, 2 data/validation, 3 numerical.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(1, what) {}
};

/// Malformed input: bad container, shape mismatch, invariant violation.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(2, what) {}
};

/// The requested quantity does not exist for these inputs (no endpoint,
/// degenerate mask column, undefined refinement).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(3, what) {}
};

}  // namespace steer
