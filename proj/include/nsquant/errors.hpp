#pragma once

#include <stdexcept>
#include <string>

namespace nsquant {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input that fails a structural precondition (bad grid, bad bandwidth, bad spec).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Fewer weighted observations than the fit needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; message carries the offending row.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Numerical routine could not reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsquant
