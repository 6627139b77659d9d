#pragma once

#include <stdexcept>
#include <string>

namespace gwl {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (files, arguments, shapes).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a usable result.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace gwl
