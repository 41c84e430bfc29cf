#pragma once

#include <stdexcept>
#include <string>

namespace glmcf {

// Error taxonomy maps onto CLI exit codes: validation -> 2,
// numerical terminal (blowup, degeneracy) -> 3, enumeration budget -> 4.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BlowupError : NumericalError {
  explicit BlowupError(const std::string& msg) : NumericalError(msg) {}
};

struct EnumerationBudgetError : std::runtime_error {
  explicit EnumerationBudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace glmcf
