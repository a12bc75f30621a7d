#pragma once

#include <stdexcept>
#include <string>

namespace deplabel {

// Malformed or inconsistent input data. The CLI maps it to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A tree that the requested encoding cannot represent (non-projective
// trees under the bracket encoding).
class EncodeError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace deplabel
