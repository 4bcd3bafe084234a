//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef S2G_ERROR_HPP_
#define S2G_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace s2g {

// Base class for all recoverable failures raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed textual input (XYZ blocks, patterns, configs). Messages carry
// enough position info to locate the offending token.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &what) : Error(what) {}
};

// Shape/precondition violations in numeric code.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string &what) : Error(what) {}
};

// Non-finite values produced where the computation contract requires
// finite ones (overflow, NaN propagation).
class NumericError : public Error {
 public:
  explicit NumericError(const std::string &what) : Error(what) {}
};

}  // namespace s2g

#endif  // S2G_ERROR_HPP_
