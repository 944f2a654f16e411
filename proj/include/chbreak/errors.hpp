#pragma once

#include <stdexcept>
#include <string>

namespace chbreak {

/// Non-finite values appeared in a field or an intermediate product.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its validity region (edge decay, bad
/// parameters, grid mismatch).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace chbreak
