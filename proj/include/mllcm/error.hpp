#pragma once

#include <stdexcept>
#include <string>

namespace mllcm {

/// Bad arguments or malformed input (dimension mismatch, out-of-range values).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator could not produce exactly K nonempty classes.
class EstimationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested size is outside what an exact routine supports.
class UnsupportedSize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace mllcm
