#pragma once

#include <stdexcept>
#include <string>

namespace spread {

/// Bad input: file contents, parameter ranges, shape mismatches. CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical breakdown: eigensolver non-convergence, singular systems. CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spread
